#include <string>

#include "CLI11.hpp"
#include "memodiff/cli.hpp"

int main(int argc, char** argv) {
    CLI::App app{"Spectral simulator for nonclassical diffusion with fading memory"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    double dt = 0.0, t_end = 0.0;
    int workers = 1;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path,
                        "configuration file (omit for the built-in default)");
        sub->add_option("--out", out_dir, "output directory")->required();
        sub->add_option("--dt", dt, "time step override");
        sub->add_option("--t-end", t_end, "final time override");
        sub->add_option("--workers", workers, "worker threads for ensembles");
    };

    CLI::App* run = app.add_subcommand("run", "integrate one trajectory, emit CSVs");
    CLI::App* verify = app.add_subcommand("verify", "run the inequality suite");
    CLI::App* pullback =
        app.add_subcommand("pullback", "pullback ensemble convergence table");
    CLI::App* sweep = app.add_subcommand("sweep", "vary one declared parameter");
    for (CLI::App* sub : {run, verify, pullback, sweep}) add_common(sub);

    CLI11_PARSE(app, argc, argv);

    memodiff::RunManifest manifest;
    if (verify->parsed())
        manifest.command = memodiff::RunManifest::Command::Verify;
    else if (pullback->parsed())
        manifest.command = memodiff::RunManifest::Command::Pullback;
    else if (sweep->parsed())
        manifest.command = memodiff::RunManifest::Command::Sweep;
    else
        manifest.command = memodiff::RunManifest::Command::Run;
    manifest.config_path = config_path;
    manifest.out_dir = out_dir;
    manifest.dt_override = dt;
    manifest.t_end_override = t_end;
    manifest.workers = workers;
    return memodiff::run_command(manifest);
}
