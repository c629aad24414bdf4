#pragma once

#include <string>
#include <vector>

#include "memodiff/dynamics.hpp"

namespace memodiff {

// Everything a run needs beyond the model itself: experiment knobs that the
// drivers (run/verify/pullback/sweep) read from the same flat config file.
struct LoadedConfig {
    ModelConfig model;

    std::string initial = "default";  // "default" or "zero"
    int ensemble_size = 6;
    int pullback_levels = 5;
    double pullback_spacing = 10.0;
    double ball_radius = 10.0;
    std::string sweep_param;  // empty: no sweep declared
    std::vector<double> sweep_values;

    // Constant eps violates the decay hypothesis; such configs are accepted
    // but flagged, and are meant for oracle comparisons only.
    bool autonomous_mode = false;
};

// Flat INI: [domain], [epsilon], [kernel], [nonlinearity], [forcing],
// [numerics]. '#' and ';' start comments. Unknown sections or keys are
// rejected with the offending line number, as is any malformed value.
// Validation runs before anything heavy: the kernel sign/decay checks, the
// nonlinearity envelope sampling, and the epsilon parameter checks all
// happen here, so a config that reaches the solver satisfies the standing
// hypotheses.
LoadedConfig parse_config(const std::string& text);
LoadedConfig load_config_file(const std::string& path);

// The canonical config: every constant written out explicitly.
std::string default_config_text();

// Human-readable echo of the parsed constants and everything derived from
// them (lambda_tilde, L, rho, alpha); goes to the run log.
std::string config_echo(const LoadedConfig& lc);

}  // namespace memodiff
