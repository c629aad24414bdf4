#pragma once

#include <limits>
#include <string>
#include <vector>

namespace memodiff {

// One verified inequality sample: lhs <= rhs up to the report tolerance.
struct EstimateSample {
    double t = 0.0;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin() const { return rhs - lhs; }
};

// Outcome of checking one estimate along a trajectory (or over a node set).
// pass is true exactly when worst_margin >= -tolerance, with tolerance the
// absolute slack actually applied.
struct EstimateReport {
    std::string name;
    std::vector<EstimateSample> samples;
    double tolerance = 0.0;
    double worst_margin = std::numeric_limits<double>::infinity();
    int worst_index = -1;
    bool pass = false;

    void add(double t, double lhs, double rhs) {
        samples.push_back({t, lhs, rhs});
        double m = rhs - lhs;
        if (m < worst_margin) {
            worst_margin = m;
            worst_index = static_cast<int>(samples.size()) - 1;
        }
    }

    // Recompute pass from the collected samples and the given tolerance.
    void finalize(double tol) {
        tolerance = tol;
        if (samples.empty()) {
            worst_margin = std::numeric_limits<double>::infinity();
            worst_index = -1;
        }
        pass = worst_margin >= -tolerance;
    }

    std::string summary_line() const;
};

}  // namespace memodiff
