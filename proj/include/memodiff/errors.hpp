#pragma once

#include <stdexcept>
#include <string>

namespace memodiff {

// Configuration / precondition failures detected before any stepping.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Parameter outside its documented range (e.g. Sobolev exponent).
struct RangeError : std::invalid_argument {
    explicit RangeError(const std::string& what) : std::invalid_argument(what) {}
};

// Mismatched array / basis / grid sizes.
struct ShapeError : std::invalid_argument {
    explicit ShapeError(const std::string& what) : std::invalid_argument(what) {}
};

// a + b*lambda_j vanished in a diagonal solve.
struct SingularOperatorError : std::runtime_error {
    explicit SingularOperatorError(const std::string& what) : std::runtime_error(what) {}
};

// Memory kernel failed a pointwise H3-style check; carries the offending node.
struct InvalidKernelError : std::runtime_error {
    InvalidKernelError(const std::string& what, int node_index, double node_s)
        : std::runtime_error(what), node_index(node_index), node_s(node_s) {}
    int node_index;
    double node_s;
};

// Stored trajectory does not cover the requested time window.
struct CoverageError : std::runtime_error {
    explicit CoverageError(const std::string& what) : std::runtime_error(what) {}
};

// Two trajectories / states that must share a grid or a time do not.
struct ComparabilityError : std::runtime_error {
    explicit ComparabilityError(const std::string& what) : std::runtime_error(what) {}
};

// Non-finite state encountered while stepping; carries the step index.
struct DivergenceError : std::runtime_error {
    DivergenceError(const std::string& what, long step_index, double t)
        : std::runtime_error(what), step_index(step_index), t(t) {}
    long step_index;
    double t;
};

// An oracle was asked about a configuration it cannot represent exactly.
struct InapplicableOracleError : std::runtime_error {
    explicit InapplicableOracleError(const std::string& what) : std::runtime_error(what) {}
};

// Config file syntax problem; carries the 1-based line number.
struct ParseError : std::runtime_error {
    ParseError(const std::string& what, int line) : std::runtime_error(what), line(line) {}
    int line;
};

}  // namespace memodiff
