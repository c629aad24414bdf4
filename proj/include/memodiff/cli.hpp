#pragma once

#include <string>

#include "memodiff/config.hpp"

namespace memodiff {

// One fully-described invocation; the binary only translates flags into this.
struct RunManifest {
    enum class Command { Run, Verify, Pullback, Sweep };

    Command command = Command::Run;
    std::string config_path;  // empty: use the built-in default config
    std::string out_dir = ".";
    double dt_override = 0.0;     // 0 keeps the config value
    double t_end_override = 0.0;  // 0 keeps the config value
    int workers = 1;
};

// Runs the manifest end to end and writes its artifacts under out_dir.
// Exit codes: 0 success (and, for verify/pullback, every check passed);
// 1 a verification check failed; 2 the configuration was rejected;
// 3 the solver diverged. Log verbosity comes from MEMODIFF_LOG
// (quiet | info | debug; default info).
int run_command(const RunManifest& manifest);

}  // namespace memodiff
