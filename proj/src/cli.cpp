#include "memodiff/cli.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <thread>

#include "memodiff/analysis.hpp"
#include "memodiff/errors.hpp"
#include "memodiff/kernels.hpp"
#include "memodiff/oracle.hpp"
#include "memodiff/report_io.hpp"

namespace memodiff {

namespace {

int log_level() {
    const char* env = std::getenv("MEMODIFF_LOG");
    if (!env) return 1;
    std::string v(env);
    if (v == "quiet") return 0;
    if (v == "debug") return 2;
    return 1;
}

struct Logger {
    int level = log_level();
    std::ostringstream file_copy;

    void info(const std::string& msg) {
        if (level >= 1) std::cout << msg << "\n";
        file_copy << msg << "\n";
    }
    void debug(const std::string& msg) {
        if (level >= 2) std::cout << msg << "\n";
    }
    void dump(const std::string& path) {
        std::ofstream out(path);
        if (out) out << file_copy.str();
    }
};

SystemState initial_state(const LoadedConfig& lc, double tau) {
    if (lc.initial == "zero") return zero_state(lc.model, tau);
    return default_initial_state(lc.model, tau);
}

// Runs a list of independent jobs over `workers` threads with slot-indexed
// results, so the aggregate never depends on scheduling order.
void run_jobs(int n_jobs, int workers, const std::function<void(int)>& job) {
    if (workers <= 1 || n_jobs <= 1) {
        for (int i = 0; i < n_jobs; ++i) job(i);
        return;
    }
    std::atomic<int> next{0};
    int n_threads = std::min(workers, n_jobs);
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n_threads));
    for (int w = 0; w < n_threads; ++w)
        pool.emplace_back([&, w]() {
            try {
                for (;;) {
                    int id = next.fetch_add(1);
                    if (id >= n_jobs) break;
                    job(id);
                }
            } catch (...) {
                errs[static_cast<std::size_t>(w)] = std::current_exception();
            }
        });
    for (std::thread& th : pool) th.join();
    for (const std::exception_ptr& e : errs)
        if (e) std::rethrow_exception(e);
}

int command_run(const LoadedConfig& lc, const RunManifest& m, Logger& log) {
    const ModelConfig& cfg = lc.model;
    Trajectory traj = evolve(initial_state(lc, 0.0), cfg.t_end, cfg);
    std::filesystem::path out(m.out_dir);
    write_trajectory_csv((out / "trajectory.csv").string(), traj);
    {
        std::ofstream hist(out / "history_final.csv");
        if (!hist) throw ConfigError("cannot open history_final.csv");
        write_history_csv(traj.final_state.eta, hist);
    }
    log.info("wrote " + (out / "trajectory.csv").string());
    log.info("wrote " + (out / "history_final.csv").string());
    log.dump((out / "run_log.txt").string());
    return 0;
}

// The verification suite: the inequality checks the estimates modules expose,
// at a scale that finishes in about a minute. Deterministic throughout.
int command_verify(const LoadedConfig& lc, const RunManifest& m, Logger& log) {
    const ModelConfig& cfg = lc.model;
    std::vector<EstimateReport> reports;

    // Transport pairing bound over seeded admissible histories, both norms.
    for (double r : {1.0, 2.0}) {
        EstimateReport agg;
        char name[64];
        std::snprintf(name, sizeof name, "pairing-lower-bound(r=%g)", r);
        agg.name = name;
        double tol = 0.0;
        for (int k = 0; k < 10; ++k) {
            SystemState z = seeded_ball_state(cfg, 0.0, k, 2.0 + k);
            EstimateReport one =
                pairing_lower_bound_check(z.eta, cfg.kernel, cfg.basis, r);
            for (const EstimateSample& s : one.samples) agg.add(k, s.lhs, s.rhs);
            tol = std::max(tol, one.tolerance);
        }
        agg.finalize(tol);
        reports.push_back(std::move(agg));
    }

    // Convolution form vs history form of the memory term, modulo the
    // truncation boundary term.
    if (!cfg.kernel.is_zero()) {
        EstimateReport refo;
        refo.name = "reformulation-equivalence";
        const SGrid& grid = *cfg.grid;
        double kS = cfg.kernel.is_exponential()
                        ? cfg.kernel.amplitude / cfg.kernel.delta *
                              std::exp(-cfg.kernel.delta * grid.s_max)
                        : 0.0;
        for (int k = 0; k < 5; ++k) {
            SpectralField u0 = seeded_direction(cfg.basis, k);
            double gamma = 0.3 + 0.4 * k;
            std::vector<SpectralField> past;
            std::vector<std::vector<double>> past_raw;
            past.reserve(static_cast<std::size_t>(grid.n_nodes()));
            for (int i = 0; i < grid.n_nodes(); ++i) {
                double decay = std::exp(-gamma * grid.nodes[static_cast<std::size_t>(i)]);
                SpectralField ui(cfg.basis.n_modes);
                for (int j = 0; j < cfg.basis.n_modes; ++j) ui[j] = decay * u0[j];
                past_raw.push_back(ui.coeffs);
                past.push_back(std::move(ui));
            }
            SpectralField direct = direct_convolution_memory(
                past_raw, grid.ds, grid.s_max, cfg.kernel, cfg.basis);
            HistoryField eta = history_from_trajectory(past, grid.ds, cfg.grid);
            SpectralField mem = memory_term(eta, cfg.mu_table, cfg.basis);
            double diff_sq = 0.0, ref_sq = 0.0;
            for (int j = 0; j < cfg.basis.n_modes; ++j) {
                double boundary = kS * cfg.basis.lambda[j] * eta.at(grid.segments, j);
                double d = direct[j] - mem[j] - boundary;
                diff_sq += d * d;
                ref_sq += direct[j] * direct[j];
            }
            refo.add(k, std::sqrt(diff_sq), 1e-5 * std::sqrt(ref_sq));
        }
        refo.finalize(0.0);
        reports.push_back(std::move(refo));
    }

    // Main stepper against the reduced-ODE reference.
    if (cfg.kernel.is_exponential()) {
        SystemState z0 = default_initial_state(cfg, 0.0);
        double T = std::min(cfg.t_end, 10.0);
        Trajectory main_traj = evolve(z0, T, cfg);
        PronyTrajectory ref = prony_evolve(z0, T, cfg);
        double diff_sq = 0.0, ref_sq = 0.0;
        for (int j = 0; j < cfg.basis.n_modes; ++j) {
            double d = main_traj.final_state.u[j] - ref.u.back()[static_cast<std::size_t>(j)];
            diff_sq += d * d;
            ref_sq += ref.u.back()[static_cast<std::size_t>(j)] *
                      ref.u.back()[static_cast<std::size_t>(j)];
        }
        EstimateReport orac;
        orac.name = "oracle-equivalence";
        orac.add(T, std::sqrt(diff_sq), 5.0 * cfg.dt * std::sqrt(ref_sq));
        orac.finalize(0.0);
        reports.push_back(std::move(orac));
    } else {
        log.info("oracle-equivalence: skipped (kernel not exponential)");
    }

    // Dissipative bound on three ball states, then the pooled absorbing ball.
    std::vector<double> targets = {1.0, 50.0, 100.0};
    std::vector<Trajectory> trajs(targets.size());
    run_jobs(static_cast<int>(targets.size()), m.workers, [&](int i) {
        SystemState z = seeded_ball_state(cfg, 0.0, i, targets[static_cast<std::size_t>(i)]);
        trajs[static_cast<std::size_t>(i)] = evolve(z, 10.0, cfg);
    });
    double Q = 0.0;
    for (std::size_t i = 0; i < trajs.size(); ++i) {
        reports.push_back(dissipative_bound_check(trajs[i], cfg,
                                                  std::sqrt(targets[i])));
        Q = std::max(Q, gronwall_q(empirical_k2(trajs[i]), cfg));
    }
    reports.push_back(absorbing_check(trajs, cfg, lc.ball_radius, Q));

    // Difference bounds on two trajectory pairs.
    std::vector<PairTrajectory> pairs(2);
    run_jobs(2, m.workers, [&](int i) {
        SystemState za = seeded_ball_state(cfg, 0.0, 2 * i, 25.0 + 25.0 * i);
        SystemState zb = seeded_ball_state(cfg, 0.0, 2 * i + 1, 50.0 + 25.0 * i);
        pairs[static_cast<std::size_t>(i)] = evolve_pair(za, zb, 5.0, cfg);
    });
    for (const PairTrajectory& pair : pairs) {
        ContractionReports c = contraction_check(pair, cfg);
        reports.push_back(std::move(c.uniqueness));
        reports.push_back(std::move(c.decomposition));
    }

    std::filesystem::path out(m.out_dir);
    write_reports_csv((out / "reports.csv").string(), reports);
    bool all_pass = true;
    for (const EstimateReport& r : reports) {
        log.info(r.summary_line());
        all_pass = all_pass && r.pass;
    }
    log.info("wrote " + (out / "reports.csv").string());
    log.dump((out / "verify_log.txt").string());
    return all_pass ? 0 : 1;
}

int command_pullback(const LoadedConfig& lc, const RunManifest& m, Logger& log) {
    const ModelConfig& cfg = lc.model;
    std::vector<double> taus;
    for (int k = 1; k <= lc.pullback_levels; ++k)
        taus.push_back(-lc.pullback_spacing * k);

    PullbackResult res = pullback_attractor_approx(0.0, taus, lc.ensemble_size,
                                                   lc.ball_radius, cfg, m.workers);
    std::vector<EstimateReport> reports;
    reports.push_back(res.report);

    // Unforced dissipative configs must collapse onto zero; check the decay
    // of the distance to the origin as tau recedes.
    bool unforced = cfg.g_norm_sq == 0.0 && cfg.nonlin.l == 0.0;
    if (unforced) {
        EstimateReport collapse;
        collapse.name = "pullback-collapse";
        std::vector<SystemState> origin = {zero_state(cfg, 0.0)};
        double prev = 0.0;
        for (std::size_t k = 0; k < taus.size(); ++k) {
            SystemState z0 = seeded_ball_state(cfg, taus[k], 0,
                                               lc.ball_radius * lc.ball_radius);
            SystemState zt = evolve(z0, 0.0, cfg).final_state;
            double d = hausdorff_semidistance({zt}, origin, cfg, 1.0);
            collapse.add(taus[k], d, k == 0 ? d : prev);
            prev = d;
        }
        collapse.add(taus.back(), prev, 1e-4);  // final threshold
        collapse.finalize(1e-12);
        reports.push_back(std::move(collapse));
    }

    std::filesystem::path out(m.out_dir);
    {
        std::ofstream tab(out / "pullback.csv");
        if (!tab) throw ConfigError("cannot open pullback.csv");
        tab << "k,tau,delta\n";
        for (std::size_t k = 0; k < taus.size(); ++k)
            tab << (k + 1) << ',' << format_g17(taus[k]) << ','
                << format_g17(res.deltas[k]) << '\n';
    }
    write_snapshot_csv((out / "attractor.csv").string(), res.snapshot, cfg);
    write_reports_csv((out / "pullback_reports.csv").string(), reports);

    bool all_pass = true;
    for (const EstimateReport& r : reports) {
        log.info(r.summary_line());
        all_pass = all_pass && r.pass;
    }
    log.info("wrote " + (out / "pullback.csv").string());
    log.dump((out / "pullback_log.txt").string());
    return all_pass ? 0 : 1;
}

void apply_sweep_value(ModelConfig& cfg, const std::string& param, double value) {
    if (param == "eps0") {
        cfg.eps = cfg.eps.kind == EpsilonSpec::Kind::Logistic
                      ? EpsilonSpec::logistic(value, cfg.eps.kappa)
                      : EpsilonSpec::constant(value);
    } else if (param == "kappa") {
        cfg.eps = EpsilonSpec::logistic(cfg.eps.eps0, value);
    } else if (param == "delta" || param == "amplitude") {
        if (!cfg.kernel.is_exponential())
            throw ConfigError("sweep: kernel parameters need an exponential kernel");
        double c = param == "amplitude" ? value : cfg.kernel.amplitude;
        double d = param == "delta" ? value : cfg.kernel.delta;
        cfg.kernel = MemoryKernel::exponential(c, d);
    } else if (param == "l") {
        switch (cfg.nonlin.kind) {
            case NonlinearitySpec::Kind::Cubic:
                cfg.nonlin = NonlinearitySpec::cubic(value);
                break;
            case NonlinearitySpec::Kind::OddPower:
                cfg.nonlin = NonlinearitySpec::odd_power(cfg.nonlin.p, value);
                break;
            case NonlinearitySpec::Kind::None:
                throw ConfigError("sweep: no l to vary for f = 0");
        }
    } else if (param == "dt") {
        cfg.dt = value;
    } else {
        throw ConfigError("sweep: unknown parameter '" + param + "'");
    }
    finalize_model(cfg);
}

int command_sweep(const LoadedConfig& lc, const RunManifest& m, Logger& log) {
    if (lc.sweep_param.empty() || lc.sweep_values.empty())
        throw ConfigError("sweep needs sweep_param and sweep_values in [numerics]");

    struct Row {
        double value, final_l2, final_mt1, k2, q;
    };
    std::vector<Row> rows(lc.sweep_values.size());
    run_jobs(static_cast<int>(lc.sweep_values.size()), m.workers, [&](int i) {
        LoadedConfig local = lc;
        apply_sweep_value(local.model, lc.sweep_param,
                          lc.sweep_values[static_cast<std::size_t>(i)]);
        Trajectory traj =
            evolve(initial_state(local, 0.0), local.model.t_end, local.model);
        double k2 = empirical_k2(traj);
        rows[static_cast<std::size_t>(i)] = {
            lc.sweep_values[static_cast<std::size_t>(i)], traj.samples.back().l2,
            traj.samples.back().mt1, k2, gronwall_q(k2, local.model)};
    });

    std::filesystem::path out(m.out_dir);
    {
        std::ofstream tab(out / "sweep.csv");
        if (!tab) throw ConfigError("cannot open sweep.csv");
        tab << lc.sweep_param << ",final_u_l2_sq,final_state_m1_sq,k2,q\n";
        for (const Row& r : rows)
            tab << format_g17(r.value) << ',' << format_g17(r.final_l2) << ','
                << format_g17(r.final_mt1) << ',' << format_g17(r.k2) << ','
                << format_g17(r.q) << '\n';
    }
    log.info("wrote " + (out / "sweep.csv").string());
    log.dump((out / "sweep_log.txt").string());
    return 0;
}

}  // namespace

int run_command(const RunManifest& manifest) {
    Logger log;
    try {
        LoadedConfig lc = manifest.config_path.empty()
                              ? parse_config(default_config_text())
                              : load_config_file(manifest.config_path);
        if (manifest.dt_override > 0.0) lc.model.dt = manifest.dt_override;
        if (manifest.t_end_override > 0.0) lc.model.t_end = manifest.t_end_override;
        if (manifest.dt_override > 0.0 || manifest.t_end_override > 0.0)
            finalize_model(lc.model);

        std::error_code ec;
        std::filesystem::create_directories(manifest.out_dir, ec);
        if (ec) throw ConfigError("cannot create output directory: " + manifest.out_dir);

        log.debug("simd backend: " +
                  std::string(kern::backend_name(kern::active())));
        log.info(config_echo(lc));

        switch (manifest.command) {
            case RunManifest::Command::Run:
                return command_run(lc, manifest, log);
            case RunManifest::Command::Verify:
                return command_verify(lc, manifest, log);
            case RunManifest::Command::Pullback:
                return command_pullback(lc, manifest, log);
            case RunManifest::Command::Sweep:
                return command_sweep(lc, manifest, log);
        }
        return 2;
    } catch (const DivergenceError& e) {
        std::cerr << "solver divergence: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

}  // namespace memodiff
