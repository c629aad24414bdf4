#pragma once

#include <cstddef>
#include <vector>

// Spectral layer: Dirichlet eigenpairs of A = -d2/dx2 on (0, length),
//
//   lambda_j = (j*pi/length)^2,   w_j(x) = sqrt(2/length) * sin(j*pi*x/length),
//
// truncated to n_modes.  Physical-space work happens on the interior nodes
// x_i = i*length/(n_quad+1), i = 1..n_quad, with the flat weight
// h = length/(n_quad+1).  On that grid the discrete sine modes are exactly
// orthonormal (up to rounding) whenever n_modes <= n_quad, so projections of
// band-limited data are aliasing-free; n_quad >= 4*n_modes keeps cubic
// products of resolved modes alias-free as well.

namespace memodiff {

// Coefficient vector against the eigenbasis; index 0 holds mode 1.
struct SpectralField {
    std::vector<double> coeffs;

    SpectralField() = default;
    explicit SpectralField(std::size_t n) : coeffs(n, 0.0) {}

    std::size_t size() const { return coeffs.size(); }
    double& operator[](std::size_t j) { return coeffs[j]; }
    double operator[](std::size_t j) const { return coeffs[j]; }
    double* data() { return coeffs.data(); }
    const double* data() const { return coeffs.data(); }
};

struct EigenBasis {
    double length = 0.0;
    int n_modes = 0;
    int n_quad = 0;

    std::vector<double> lambda;   // eigenvalues, ascending
    std::vector<double> lambda2;  // lambda^2
    std::vector<double> lambda3;  // lambda^3

    std::vector<double> nodes;    // interior quadrature nodes
    double h = 0.0;               // quadrature weight per node

    // mode values tabulated both ways for contiguous access
    std::vector<double> by_node;  // [node][mode], row-major
    std::vector<double> by_mode;  // [mode][node], row-major

    const double* node_row(int i) const { return by_node.data() + static_cast<std::size_t>(i) * n_modes; }
    const double* mode_row(int j) const { return by_mode.data() + static_cast<std::size_t>(j) * n_quad; }

    // lambda^s for integer s in {0,1,2,3}; nullptr if s is not an integer.
    const double* lambda_pow_table(double s) const;
};

// Validates length > 0, n_modes >= 1, n_quad >= 4*n_modes, and tabulates.
EigenBasis build_basis(double length, int n_modes, int n_quad);

// sum_j lambda_j^s * coeffs_j^2 for s in [0, 3].
double sobolev_norm_sq(const SpectralField& u, const EigenBasis& basis, double s);

// Solves (a*I + b*A) v = rhs mode-wise: v_j = rhs_j / (a + b*lambda_j).
SpectralField resolvent_solve(double a, double b, const SpectralField& rhs,
                              const EigenBasis& basis);

// Coefficients -> values on the quadrature nodes.
std::vector<double> to_physical(const SpectralField& u, const EigenBasis& basis);
void to_physical_into(const SpectralField& u, const EigenBasis& basis,
                      std::vector<double>& values);

// Values on the quadrature nodes -> coefficients (discrete L2 projection).
SpectralField from_physical(const std::vector<double>& values, const EigenBasis& basis);
void from_physical_into(const std::vector<double>& values, const EigenBasis& basis,
                        SpectralField& out);

// h * sum_i values_i^p with p >= 1 (used for the L^p forcing bound).
double lp_norm_p(const std::vector<double>& values, const EigenBasis& basis, double p);

}  // namespace memodiff
