#pragma once

#include <iosfwd>
#include <memory>
#include <vector>

#include "memodiff/report.hpp"
#include "memodiff/spectral.hpp"

// Fading-memory layer.  The past enters through the accumulated-history
// variable
//
//   eta^t(x, s) = integral_0^s u(x, t - r) dr,   s >= 0,
//
// which satisfies eta(0) = 0 and the transport law eta_t = -eta_s + u(t).
// Histories are stored mode-wise on a uniform s-grid [0, S_max]; the kernel
// weight mu enters through quadrature.  The s-quadrature uses trapezoidal
// weights with two Gregory endpoint corrections, which restores fourth-order
// accuracy for integrands like mu*eta that have nonzero slope at s = 0 (a
// plain trapezoid would cap every mu-integral at ~1e-5 relative accuracy on
// the default grid, well above the tolerances the verifiers run at).

namespace memodiff {

struct MemoryKernel {
    enum class Kind { Exponential, Tabulated };

    Kind kind = Kind::Exponential;
    double amplitude = 0.0;  // c in mu(s) = c * exp(-delta * s)
    double delta = 0.0;
    double rho = 0.0;        // pairing constant: delta, or inf(-mu'/mu) on the grid
    double mass = 0.0;       // integral of mu over [0, infinity)

    // Tabulated kernels carry node samples for the grid they were built on,
    // plus that grid's spacing so mu(s)/dmu(s) can answer at any point that
    // lands on a node.
    std::vector<double> mu_samples;
    std::vector<double> dmu_samples;
    double sample_ds = 0.0;

    static MemoryKernel exponential(double amplitude, double delta);
    static MemoryKernel zero();

    bool is_zero() const;
    bool is_exponential() const { return kind == Kind::Exponential; }

    // Pointwise values; tabulated kernels only answer at points that land on
    // one of their own nodes (RangeError otherwise).
    double mu(double s) const;
    double dmu(double s) const;
};

// Builds a tabulated kernel from node samples of mu and mu' on `grid`.
// declared_delta is the decay constant the kernel claims (checked by
// validate_kernel); rho and mass are derived from the samples themselves.
struct SGrid;
MemoryKernel tabulated_kernel(std::vector<double> mu_samples,
                              std::vector<double> dmu_samples, const SGrid& grid,
                              double declared_delta);

// Uniform memory grid s_k = k * ds, k = 0..segments, with endpoint-corrected
// trapezoidal weights for integrals over [0, S_max].
struct SGrid {
    std::vector<double> nodes;
    std::vector<double> weights;
    double s_max = 0.0;
    double ds = 0.0;
    int segments = 0;

    int n_nodes() const { return segments + 1; }

    static SGrid uniform(double s_max, int segments);
};

// Checks mu >= 0, mu' <= 0 and mu' + delta*mu <= 0 node-by-node (tolerance
// 1e-12 in report units); additionally checks the declared tail bound
// mu(S_max) <= tail_tol * mu(0) when mu(0) > 0.
EstimateReport validate_kernel(const MemoryKernel& kernel, const SGrid& grid,
                               double tail_tol);

// Same checks, but throws InvalidKernelError (with the offending node) on the
// first violation.  Used on the configuration path.
void require_valid_kernel(const MemoryKernel& kernel, const SGrid& grid, double tail_tol);

// Node-cached kernel weights; the stepping loop reuses one of these instead
// of re-evaluating mu at every node each step.
struct MuTable {
    std::vector<double> mu;   // mu(s_k)
    std::vector<double> wmu;  // weights_k * mu(s_k)
};
MuTable tabulate_kernel(const MemoryKernel& kernel, const SGrid& grid);

// Mode-wise history values on the s-grid; row k holds all modes at s_k.
// Row 0 (s = 0) is identically zero by construction.
struct HistoryField {
    std::shared_ptr<const SGrid> grid;
    int n_modes = 0;
    std::vector<double> data;  // (segments+1) x n_modes, row-major

    static HistoryField zeros(std::shared_ptr<const SGrid> grid, int n_modes);

    double* row(int k) { return data.data() + static_cast<std::size_t>(k) * n_modes; }
    const double* row(int k) const {
        return data.data() + static_cast<std::size_t>(k) * n_modes;
    }
    double& at(int k, int j) { return data[static_cast<std::size_t>(k) * n_modes + j]; }
    double at(int k, int j) const {
        return data[static_cast<std::size_t>(k) * n_modes + j];
    }
};

enum class InterpOrder { Linear, Cubic };

// Builds eta(s_k) = integral_0^{s_k} u(t - r) dr from trajectory samples.
// u_past[i] is u at t - i*sample_dt, newest first; samples must cover
// [0, S_max] and the grid spacing must be an integer multiple of sample_dt.
HistoryField history_from_trajectory(const std::vector<SpectralField>& u_past,
                                     double sample_dt,
                                     std::shared_ptr<const SGrid> grid);

// Memory forcing in mode space: (memory_term)_j = lambda_j * integral mu * eta_j ds,
// i.e. the positive quantity that enters the u-equation with a plus sign.
SpectralField memory_term(const HistoryField& eta, const MemoryKernel& kernel,
                          const EigenBasis& basis);
SpectralField memory_term(const HistoryField& eta, const MuTable& table,
                          const EigenBasis& basis);

// ||eta||^2_{mu,r} = integral mu(s) * ||eta(s)||_r^2 ds for r in [0, 3].
double mu_norm_sq(const HistoryField& eta, const MemoryKernel& kernel,
                  const EigenBasis& basis, double r);
double mu_norm_sq(const HistoryField& eta, const MuTable& table,
                  const EigenBasis& basis, double r);

// One transport step: eta^{t+dt}(s) = eta^t(s - dt) + dt * u_new for s >= dt,
// s * u_new below, row 0 pinned to zero.  When dt is an integer multiple of
// the grid spacing the shift is exact; otherwise the lookup interpolates at
// the requested order.
HistoryField advance_history(const HistoryField& eta, const SpectralField& u_new,
                             double dt, InterpOrder interp);

// Buffer-reusing variant for the stepping loop; `out` must not alias `eta`
// and is fully overwritten.
void advance_history_into(const HistoryField& eta, const SpectralField& u_new,
                          double dt, InterpOrder interp, HistoryField& out);

// Discrete d/ds of a history field (one-sided fourth-order stencils).
HistoryField ds_history(const HistoryField& eta);

// Checks the transport pairing bound <eta, eta_s>_{mu,r} >= (rho/2)*||eta||^2_{mu,r}.
// The margin is reported relative to ||eta||^2_{mu,r}; tol_rel is the allowed
// relative shortfall.
EstimateReport pairing_lower_bound_check(const HistoryField& eta,
                                         const MemoryKernel& kernel,
                                         const EigenBasis& basis, double r,
                                         double tol_rel = 1e-6);

// Long-format CSV dump: columns s, mode, coeff.
void write_history_csv(const HistoryField& eta, std::ostream& os);

// integral_0^{S} exp(-varrho*s) * ||grad u(t-s)||^2 ds over the given samples
// (trapezoid on the sample spacing); the admissible-history bound.
double admissibility_integral(const std::vector<SpectralField>& u_past,
                              double sample_dt, double varrho,
                              const EigenBasis& basis);

}  // namespace memodiff
