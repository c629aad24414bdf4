// End-to-end checks for the command driver: artifact layout, exit codes,
// overrides, and byte-identical reruns. Everything runs on a reduced
// eight-mode configuration so the whole file stays fast.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "memodiff/cli.hpp"

namespace fs = std::filesystem;
using namespace memodiff;

namespace {

// The driver logs to stderr by default; keep test output readable.
const bool quiet_logs = [] {
    ::setenv("MEMODIFF_LOG", "quiet", 1);
    return true;
}();

fs::path scratch_dir(const std::string& name) {
    fs::path p = fs::temp_directory_path() / "memodiff_cli_tests" / name;
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

fs::path write_file(const fs::path& dir, const std::string& name,
                    const std::string& text) {
    fs::path p = dir / name;
    std::ofstream out(p);
    out << text;
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    REQUIRE_MESSAGE(in.good(), "missing artifact: " << p.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::vector<std::string> lines_of(const std::string& text) {
    std::vector<std::string> out;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) out.push_back(line);
    return out;
}

std::vector<std::string> fields_of(const std::string& line) {
    std::vector<std::string> out;
    std::istringstream in(line);
    std::string item;
    while (std::getline(in, item, ',')) out.push_back(item);
    return out;
}

// Small spatial resolution, default time grid and memory grid.
const char* kReducedDomain =
    "[domain]\n"
    "n_modes = 8\n"
    "n_quad = 32\n";

}  // namespace

TEST_CASE("run command writes a trajectory and respects overrides") {
    fs::path dir = scratch_dir("run");
    fs::path cfg = write_file(dir, "config.ini",
                              std::string(kReducedDomain) +
                                  "[numerics]\n"
                                  "t_end = 1.0\n"
                                  "initial = zero\n");
    REQUIRE(quiet_logs);

    RunManifest m;
    m.command = RunManifest::Command::Run;
    m.config_path = cfg.string();
    m.out_dir = (dir / "out").string();
    REQUIRE(run_command(m) == 0);

    CHECK(fs::exists(dir / "out" / "run_log.txt"));

    // Zero initial state and no forcing: the solution is identically zero,
    // but epsilon(t) is still reported along the trajectory.
    std::vector<std::string> rows = lines_of(slurp(dir / "out" / "trajectory.csv"));
    REQUIRE(rows.size() == 12);  // header + samples every 0.1 over [0, 1]
    CHECK(rows[0] ==
          "t,u_l2_sq,u_h1_sq,u_h2_sq,eta_mu1_sq,eta_mu2_sq,state_m_sq,"
          "state_m1_sq,eps");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::vector<std::string> f = fields_of(rows[i]);
        REQUIRE(f.size() == 9);
        for (std::size_t c = 1; c <= 7; ++c) CHECK(std::stod(f[c]) == 0.0);
        CHECK(std::stod(f[8]) > 0.0);
    }
    CHECK(std::stod(fields_of(rows[1])[0]) == 0.0);
    CHECK(std::stod(fields_of(rows[11])[0]) == doctest::Approx(1.0));

    std::vector<std::string> hist =
        lines_of(slurp(dir / "out" / "history_final.csv"));
    REQUIRE(!hist.empty());
    CHECK(hist[0] == "s,mode,coeff");

    SUBCASE("shorter horizon produces fewer sample rows") {
        RunManifest shorter = m;
        shorter.out_dir = (dir / "out_short").string();
        shorter.t_end_override = 0.5;
        REQUIRE(run_command(shorter) == 0);
        std::vector<std::string> short_rows =
            lines_of(slurp(dir / "out_short" / "trajectory.csv"));
        CHECK(short_rows.size() == 7);  // header + t = 0, 0.1, ..., 0.5
    }

    SUBCASE("coarse dt is sampled every step") {
        RunManifest coarse = m;
        coarse.out_dir = (dir / "out_coarse").string();
        coarse.dt_override = 0.5;
        REQUIRE(run_command(coarse) == 0);
        std::vector<std::string> coarse_rows =
            lines_of(slurp(dir / "out_coarse" / "trajectory.csv"));
        REQUIRE(coarse_rows.size() == 4);  // header + t = 0, 0.5, 1.0
        CHECK(std::stod(fields_of(coarse_rows[3])[0]) == 1.0);
    }

    fs::remove_all(dir);
}

TEST_CASE("verify command passes and reruns byte-identically") {
    fs::path dir = scratch_dir("verify");
    fs::path cfg = write_file(dir, "config.ini",
                              std::string(kReducedDomain) +
                                  "[forcing]\n"
                                  "modes = 1:1.0\n"
                                  "[numerics]\n"
                                  "t_end = 2.0\n");

    RunManifest m;
    m.command = RunManifest::Command::Verify;
    m.config_path = cfg.string();

    m.out_dir = (dir / "a").string();
    REQUIRE(run_command(m) == 0);
    m.out_dir = (dir / "b").string();
    REQUIRE(run_command(m) == 0);

    std::string a = slurp(dir / "a" / "reports.csv");
    std::string b = slurp(dir / "b" / "reports.csv");
    CHECK(a == b);
    CHECK(lines_of(a).size() > 1);
    CHECK(lines_of(a)[0] == "name,t,lhs,rhs,margin");
    CHECK(fs::exists(dir / "a" / "verify_log.txt"));

    fs::remove_all(dir);
}

TEST_CASE("configuration problems exit with code 2") {
    fs::path dir = scratch_dir("badconfig");

    RunManifest m;
    m.command = RunManifest::Command::Run;
    m.out_dir = (dir / "out").string();

    SUBCASE("missing config file") {
        m.config_path = (dir / "nope.ini").string();
        CHECK(run_command(m) == 2);
    }
    SUBCASE("unknown key") {
        m.config_path =
            write_file(dir, "bad.ini", "[domain]\nbogus = 1\n").string();
        CHECK(run_command(m) == 2);
    }
    SUBCASE("sweep without a sweep parameter") {
        m.command = RunManifest::Command::Sweep;
        m.config_path = write_file(dir, "nosweep.ini", kReducedDomain).string();
        CHECK(run_command(m) == 2);
    }

    fs::remove_all(dir);
}

TEST_CASE("solver blow-up exits with code 3") {
    fs::path dir = scratch_dir("blowup");
    // Enormous forcing against the cubic reaction term makes the explicit
    // part of the splitting oscillate and overflow within a few steps.
    fs::path cfg = write_file(dir, "config.ini",
                              std::string(kReducedDomain) +
                                  "[forcing]\n"
                                  "modes = 1:1e8\n");

    RunManifest m;
    m.command = RunManifest::Command::Run;
    m.config_path = cfg.string();
    m.out_dir = (dir / "out").string();
    m.t_end_override = 1.0;
    CHECK(run_command(m) == 3);

    fs::remove_all(dir);
}

TEST_CASE("pullback command emits the convergence table") {
    fs::path dir = scratch_dir("pullback");
    fs::path cfg = write_file(dir, "config.ini",
                              std::string(kReducedDomain) +
                                  "[forcing]\n"
                                  "modes = 1:1.0\n"
                                  "[numerics]\n"
                                  "ensemble_size = 2\n"
                                  "pullback_levels = 2\n"
                                  "pullback_spacing = 2.0\n"
                                  "ball_radius = 5.0\n");

    RunManifest m;
    m.command = RunManifest::Command::Pullback;
    m.config_path = cfg.string();
    m.out_dir = (dir / "out").string();
    REQUIRE(run_command(m) == 0);

    std::vector<std::string> rows = lines_of(slurp(dir / "out" / "pullback.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "k,tau,delta");
    CHECK(std::stod(fields_of(rows[1])[1]) == -2.0);
    CHECK(std::stod(fields_of(rows[2])[1]) == -4.0);
    CHECK(std::stod(fields_of(rows[1])[2]) >= 0.0);

    std::vector<std::string> snap = lines_of(slurp(dir / "out" / "attractor.csv"));
    REQUIRE(snap.size() == 3);  // header + one row per ensemble member
    CHECK(snap[0] ==
          "index,tau,u_l2_sq,u_h1_sq,u_h2_sq,eta_mu1_sq,eta_mu2_sq,state_m1_sq");

    CHECK(lines_of(slurp(dir / "out" / "pullback_reports.csv"))[0] ==
          "name,t,lhs,rhs,margin");
    CHECK(fs::exists(dir / "out" / "pullback_log.txt"));

    fs::remove_all(dir);
}

TEST_CASE("sweep command writes one summary row per value") {
    fs::path dir = scratch_dir("sweep");
    fs::path cfg = write_file(dir, "config.ini",
                              std::string(kReducedDomain) +
                                  "[forcing]\n"
                                  "modes = 1:1.0\n"
                                  "[numerics]\n"
                                  "sweep_param = eps0\n"
                                  "sweep_values = 0.5 1.0\n");

    RunManifest m;
    m.command = RunManifest::Command::Sweep;
    m.config_path = cfg.string();
    m.out_dir = (dir / "out").string();
    m.t_end_override = 0.5;
    REQUIRE(run_command(m) == 0);

    std::vector<std::string> rows = lines_of(slurp(dir / "out" / "sweep.csv"));
    REQUIRE(rows.size() == 3);
    CHECK(rows[0] == "eps0,final_u_l2_sq,final_state_m1_sq,k2,q");
    CHECK(std::stod(fields_of(rows[1])[0]) == 0.5);
    CHECK(std::stod(fields_of(rows[2])[0]) == 1.0);
    REQUIRE(fields_of(rows[1]).size() == 5);
    CHECK(std::stod(fields_of(rows[1])[4]) > 0.0);
    CHECK(fs::exists(dir / "out" / "sweep_log.txt"));

    fs::remove_all(dir);
}
