#include "memodiff/spectral.hpp"

#include <cmath>
#include <string>

#include "memodiff/errors.hpp"
#include "memodiff/kernels.hpp"

namespace memodiff {

namespace {

constexpr double kPi = 3.14159265358979323846;

void require_same_size(const SpectralField& u, const EigenBasis& basis, const char* who) {
    if (static_cast<int>(u.size()) != basis.n_modes)
        throw ShapeError(std::string(who) + ": field has " + std::to_string(u.size()) +
                         " coefficients, basis has " + std::to_string(basis.n_modes) +
                         " modes");
}

}  // namespace

const double* EigenBasis::lambda_pow_table(double s) const {
    if (s == 0.0) return nullptr;  // weight identically 1; callers special-case
    if (s == 1.0) return lambda.data();
    if (s == 2.0) return lambda2.data();
    if (s == 3.0) return lambda3.data();
    return nullptr;
}

EigenBasis build_basis(double length, int n_modes, int n_quad) {
    if (!(length > 0.0)) throw ConfigError("build_basis: domain length must be positive");
    if (n_modes < 1) throw ConfigError("build_basis: need at least one mode");
    if (n_quad < 4 * n_modes)
        throw ConfigError("build_basis: n_quad (" + std::to_string(n_quad) +
                          ") must be >= 4*n_modes (" + std::to_string(4 * n_modes) + ")");

    EigenBasis b;
    b.length = length;
    b.n_modes = n_modes;
    b.n_quad = n_quad;

    b.lambda.resize(n_modes);
    b.lambda2.resize(n_modes);
    b.lambda3.resize(n_modes);
    for (int j = 0; j < n_modes; ++j) {
        double k = (j + 1) * kPi / length;
        double lam = k * k;
        b.lambda[j] = lam;
        b.lambda2[j] = lam * lam;
        b.lambda3[j] = lam * lam * lam;
    }

    b.h = length / (n_quad + 1);
    b.nodes.resize(n_quad);
    for (int i = 0; i < n_quad; ++i) b.nodes[i] = (i + 1) * b.h;

    double amp = std::sqrt(2.0 / length);
    b.by_node.resize(static_cast<std::size_t>(n_quad) * n_modes);
    b.by_mode.resize(static_cast<std::size_t>(n_modes) * n_quad);
    for (int i = 0; i < n_quad; ++i) {
        for (int j = 0; j < n_modes; ++j) {
            // sin(j*pi*x_i/length) with x_i = (i+1)*length/(n_quad+1)
            double v = amp * std::sin(kPi * static_cast<double>((i + 1) * (j + 1)) /
                                      (n_quad + 1));
            b.by_node[static_cast<std::size_t>(i) * n_modes + j] = v;
            b.by_mode[static_cast<std::size_t>(j) * n_quad + i] = v;
        }
    }
    return b;
}

double sobolev_norm_sq(const SpectralField& u, const EigenBasis& basis, double s) {
    require_same_size(u, basis, "sobolev_norm_sq");
    if (s < 0.0 || s > 3.0)
        throw RangeError("sobolev_norm_sq: exponent s = " + std::to_string(s) +
                         " outside [0, 3]");
    std::size_t n = u.size();
    if (s == 0.0) return kern::sumsq(u.data(), n);
    if (const double* table = basis.lambda_pow_table(s))
        return kern::wsumsq(table, u.data(), n);
    double acc = 0.0;
    for (std::size_t j = 0; j < n; ++j)
        acc += std::pow(basis.lambda[j], s) * u[j] * u[j];
    return acc;
}

SpectralField resolvent_solve(double a, double b, const SpectralField& rhs,
                              const EigenBasis& basis) {
    require_same_size(rhs, basis, "resolvent_solve");
    for (int j = 0; j < basis.n_modes; ++j) {
        double den = a + b * basis.lambda[j];
        if (std::fabs(den) < 1e-300)
            throw SingularOperatorError("resolvent_solve: a + b*lambda vanishes at mode " +
                                        std::to_string(j + 1));
    }
    SpectralField out(rhs.size());
    kern::diag_solve(out.data(), rhs.data(), a, b, basis.lambda.data(), rhs.size());
    return out;
}

std::vector<double> to_physical(const SpectralField& u, const EigenBasis& basis) {
    std::vector<double> values;
    to_physical_into(u, basis, values);
    return values;
}

void to_physical_into(const SpectralField& u, const EigenBasis& basis,
                      std::vector<double>& values) {
    require_same_size(u, basis, "to_physical");
    values.resize(basis.n_quad);
    for (int i = 0; i < basis.n_quad; ++i)
        values[i] = kern::dot(basis.node_row(i), u.data(), u.size());
}

SpectralField from_physical(const std::vector<double>& values, const EigenBasis& basis) {
    SpectralField out;
    from_physical_into(values, basis, out);
    return out;
}

void from_physical_into(const std::vector<double>& values, const EigenBasis& basis,
                        SpectralField& out) {
    if (static_cast<int>(values.size()) != basis.n_quad)
        throw ShapeError("from_physical: got " + std::to_string(values.size()) +
                         " values, basis has " + std::to_string(basis.n_quad) + " nodes");
    out.coeffs.resize(basis.n_modes);
    for (int j = 0; j < basis.n_modes; ++j)
        out[j] = basis.h * kern::dot(basis.mode_row(j), values.data(), values.size());
}

double lp_norm_p(const std::vector<double>& values, const EigenBasis& basis, double p) {
    if (static_cast<int>(values.size()) != basis.n_quad)
        throw ShapeError("lp_norm_p: value count does not match basis nodes");
    if (p < 1.0) throw RangeError("lp_norm_p: p must be >= 1");
    double acc = 0.0;
    if (p == 4.0) {
        for (double v : values) {
            double v2 = v * v;
            acc += v2 * v2;
        }
    } else {
        for (double v : values) acc += std::pow(std::fabs(v), p);
    }
    return basis.h * acc;
}

}  // namespace memodiff
