#pragma once

#include <vector>

#include "memodiff/dynamics.hpp"
#include "memodiff/memory.hpp"
#include "memodiff/spectral.hpp"

namespace memodiff {

// Exact solution of (1 + eps*lambda) u' + lambda u = 0 at time t.
double linear_mode_exact(double lambda, double eps, double u0, double t);

// One eigenmode of the reduced system obtained for an exponential kernel by
// collapsing the history to its mu-weighted integral m = int mu(s) eta(s) ds:
//
//   (1 + eps*lambda) u' = g - lambda*u - lambda*m
//   m' = -delta*m + mass*u
//
// with eps held constant.
struct PronyModeParams {
    double lambda = 0.0;
    double delta = 1.0;
    double mass = 0.0;
    double g = 0.0;
};

struct PronyModeState {
    double u = 0.0;
    double m = 0.0;
};

// Closed-form solution of the per-mode system via the 2x2 matrix exponential.
// Exact up to roundoff for any t >= 0; requires delta > 0.
PronyModeState prony_mode_exact(const PronyModeParams& p, double eps,
                                const PronyModeState& z0, double t);

// m_j(tau) = int mu(s) eta_j(s) ds for every mode, using the same endpoint
// corrected quadrature the solver uses.
std::vector<double> prony_initial_m(const HistoryField& eta, const MuTable& table);

// Reference trajectory of the full 2n-dimensional reduced ODE, nonlinearity
// included, integrated with classical RK4 at step dt/refine. Only valid when
// the kernel is exactly exponential; anything else throws
// InapplicableOracleError. Sampling cadence matches evolve().
struct PronyTrajectory {
    double tau = 0.0;
    std::vector<double> times;
    std::vector<std::vector<double>> u;  // [sample][mode]
    std::vector<std::vector<double>> m;  // [sample][mode]
};

PronyTrajectory prony_evolve(const SystemState& z_tau, double t_end,
                             const ModelConfig& cfg, int refine = 10);

// Memory term evaluated straight from stored trajectory values:
//   out_j = lambda_j * int_0^{s_max} k(s) u_j(t - s) ds,   -k' = mu, k(inf) = 0.
// u_past is newest-first: u_past[i] holds the coefficients of u(t - i*sample_dt).
// The trajectory must cover the full horizon (CoverageError otherwise). This is
// the pre-integration-by-parts form; it equals memory_term of the accumulated
// history up to the boundary term lambda_j * k(s_max) * eta_j(s_max).
SpectralField direct_convolution_memory(
    const std::vector<std::vector<double>>& u_past, double sample_dt,
    double s_max, const MemoryKernel& kernel, const EigenBasis& basis);

}  // namespace memodiff
