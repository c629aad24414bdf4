#include "memodiff/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

#include "memodiff/errors.hpp"
#include "memodiff/kernels.hpp"

namespace memodiff {

double linear_mode_exact(double lambda, double eps, double u0, double t) {
    if (lambda < 0.0 || eps < 0.0)
        throw RangeError("linear_mode_exact: lambda and eps must be >= 0");
    return u0 * std::exp(-lambda * t / (1.0 + eps * lambda));
}

namespace {

using cplx = std::complex<double>;

cplx sinch(cplx x) {
    if (std::abs(x) < 1e-8) return 1.0 + x * x / 6.0;
    return std::sinh(x) / x;
}

}  // namespace

PronyModeState prony_mode_exact(const PronyModeParams& p, double eps,
                                const PronyModeState& z0, double t) {
    if (!(p.delta > 0.0)) throw RangeError("prony_mode_exact: delta must be positive");
    if (p.lambda < 0.0 || eps < 0.0)
        throw RangeError("prony_mode_exact: lambda and eps must be >= 0");

    double au = 1.0 / (1.0 + eps * p.lambda);
    // z' = A z + b with z = (u, m).
    double A00 = -au * p.lambda, A01 = -au * p.lambda;
    double A10 = p.mass, A11 = -p.delta;
    double b0 = au * p.g;

    double u_p = 0.0, m_p = 0.0;  // particular (steady) solution
    if (p.lambda > 0.0) {
        // A is invertible: det = au*lambda*(delta + mass) > 0.
        double det = A00 * A11 - A01 * A10;
        u_p = -A11 * b0 / det;  // -A^{-1} b, written out
        m_p = A10 * b0 / det;
    } else {
        // lambda = 0: u decouples, u(t) = u0 + g t, and m obeys a scalar
        // linear ODE with that drift.
        double u0 = z0.u, m0 = z0.m, d = p.delta;
        double e = std::exp(-d * t);
        PronyModeState out;
        out.u = u0 + p.g * t;
        out.m = m0 * e + p.mass * (u0 * (1.0 - e) / d +
                                   p.g * (t / d - (1.0 - e) / (d * d)));
        return out;
    }

    // exp(At) via the symmetric Putzer form:
    //   exp(At) = e^{st} [cosh(dt) I + t sinch(dt) (A - sI)],  s = tr/2,
    //   d = sqrt(s^2 - det); exact for both real and complex pairs.
    double tr = A00 + A11;
    double det = A00 * A11 - A01 * A10;
    cplx s = 0.5 * tr;
    cplx d = std::sqrt(s * s - det);
    cplx x = d * t;
    cplx est = std::exp(s * t);
    cplx ch = std::cosh(x);
    cplx sc = t * sinch(x);

    cplx E00 = est * (ch + sc * (A00 - s));
    cplx E01 = est * sc * A01;
    cplx E10 = est * sc * A10;
    cplx E11 = est * (ch + sc * (A11 - s));

    double du = z0.u - u_p, dm = z0.m - m_p;
    PronyModeState out;
    out.u = u_p + (E00 * du + E01 * dm).real();
    out.m = m_p + (E10 * du + E11 * dm).real();
    return out;
}

std::vector<double> prony_initial_m(const HistoryField& eta, const MuTable& table) {
    std::vector<double> m(static_cast<std::size_t>(eta.n_modes), 0.0);
    for (int k = 0; k < eta.grid->n_nodes(); ++k) {
        double w = table.wmu[k];
        if (w != 0.0) kern::axpy(m.data(), w, eta.row(k), eta.n_modes);
    }
    return m;
}

namespace {

// Right side of the reduced ODE at time t; shares the model's transforms so
// the nonlinearity is evaluated on exactly the same quadrature grid.
struct PronyRhs {
    const ModelConfig& cfg;
    std::vector<double> phys;
    SpectralField fhat;

    explicit PronyRhs(const ModelConfig& cfg) : cfg(cfg), fhat(cfg.basis.n_modes) {}

    void operator()(double t, const std::vector<double>& u,
                    const std::vector<double>& m, std::vector<double>& du,
                    std::vector<double>& dm) {
        const EigenBasis& b = cfg.basis;
        int n = b.n_modes;
        SpectralField view(n);
        if (cfg.nonlin.kind != NonlinearitySpec::Kind::None) {
            view.coeffs = u;
            to_physical_into(view, b, phys);
            eval_nonlinearity(cfg.nonlin, phys);
            from_physical_into(phys, b, fhat);
        } else {
            std::fill(fhat.coeffs.begin(), fhat.coeffs.end(), 0.0);
        }
        double eps = cfg.eps.eval(t).eps;
        double delta = cfg.kernel.delta, mass = cfg.kernel.mass;
        for (int j = 0; j < n; ++j) {
            du[j] = (cfg.g[j] - b.lambda[j] * (u[j] + m[j]) - fhat[j]) /
                    (1.0 + eps * b.lambda[j]);
            dm[j] = -delta * m[j] + mass * u[j];
        }
    }
};

}  // namespace

PronyTrajectory prony_evolve(const SystemState& z_tau, double t_end,
                             const ModelConfig& cfg, int refine) {
    if (!cfg.kernel.is_exponential() && !cfg.kernel.is_zero())
        throw InapplicableOracleError(
            "prony_evolve: exact reduction requires an exponential kernel");
    if (refine < 1) throw RangeError("prony_evolve: refine must be >= 1");

    const int n = cfg.basis.n_modes;
    long n_main = std::lround((t_end - z_tau.t) / cfg.dt);
    long stride = std::max(1L, std::lround(cfg.sample_dt / cfg.dt));
    double h = cfg.dt / refine;

    std::vector<double> u = z_tau.u.coeffs;
    std::vector<double> m = prony_initial_m(z_tau.eta, cfg.mu_table);

    PronyTrajectory traj;
    traj.tau = z_tau.t;
    traj.times.push_back(z_tau.t);
    traj.u.push_back(u);
    traj.m.push_back(m);

    PronyRhs rhs(cfg);
    std::vector<double> k1u(n), k1m(n), k2u(n), k2m(n), k3u(n), k3m(n), k4u(n),
        k4m(n), ut(n), mt(n);

    double t = z_tau.t;
    for (long i = 1; i <= n_main; ++i) {
        for (int r = 0; r < refine; ++r) {
            rhs(t, u, m, k1u, k1m);
            for (int j = 0; j < n; ++j) {
                ut[j] = u[j] + 0.5 * h * k1u[j];
                mt[j] = m[j] + 0.5 * h * k1m[j];
            }
            rhs(t + 0.5 * h, ut, mt, k2u, k2m);
            for (int j = 0; j < n; ++j) {
                ut[j] = u[j] + 0.5 * h * k2u[j];
                mt[j] = m[j] + 0.5 * h * k2m[j];
            }
            rhs(t + 0.5 * h, ut, mt, k3u, k3m);
            for (int j = 0; j < n; ++j) {
                ut[j] = u[j] + h * k3u[j];
                mt[j] = m[j] + h * k3m[j];
            }
            rhs(t + h, ut, mt, k4u, k4m);
            for (int j = 0; j < n; ++j) {
                u[j] += h / 6.0 * (k1u[j] + 2.0 * k2u[j] + 2.0 * k3u[j] + k4u[j]);
                m[j] += h / 6.0 * (k1m[j] + 2.0 * k2m[j] + 2.0 * k3m[j] + k4m[j]);
            }
            t += h;
        }
        for (int j = 0; j < n; ++j)
            if (!std::isfinite(u[j]))
                throw DivergenceError("reference solution diverged at t = " +
                                          std::to_string(t),
                                      i, t);
        if (i % stride == 0 || i == n_main) {
            traj.times.push_back(t);
            traj.u.push_back(u);
            traj.m.push_back(m);
        }
    }
    return traj;
}

SpectralField direct_convolution_memory(
    const std::vector<std::vector<double>>& u_past, double sample_dt,
    double s_max, const MemoryKernel& kernel, const EigenBasis& basis) {
    if (!(sample_dt > 0.0) || !(s_max > 0.0))
        throw RangeError("direct_convolution_memory: spacing and horizon must be positive");
    long n_int = std::lround(s_max / sample_dt);
    if (std::fabs(n_int * sample_dt - s_max) > 1e-9 * std::max(1.0, s_max))
        throw CoverageError(
            "direct_convolution_memory: sample spacing does not divide the horizon");
    if (n_int < 8)
        throw CoverageError("direct_convolution_memory: need at least 8 samples over the horizon");
    if (u_past.size() < static_cast<std::size_t>(n_int) + 1)
        throw CoverageError("direct_convolution_memory: trajectory does not cover the horizon");

    SGrid quad = SGrid::uniform(s_max, static_cast<int>(n_int));

    // k(s) with -k' = mu and k(s_max) ~ tail. Exponential kernels get the
    // closed form; tabulated ones a reverse cumulative trapezoid of mu.
    std::vector<double> k(quad.n_nodes());
    if (kernel.is_exponential()) {
        double scale = kernel.amplitude / kernel.delta;
        for (int i = 0; i < quad.n_nodes(); ++i)
            k[i] = scale * std::exp(-kernel.delta * quad.nodes[i]);
    } else if (kernel.is_zero()) {
        std::fill(k.begin(), k.end(), 0.0);
    } else {
        k[quad.n_nodes() - 1] = 0.0;
        for (int i = quad.n_nodes() - 1; i > 0; --i)
            k[i - 1] = k[i] + 0.5 * quad.ds * (kernel.mu(quad.nodes[i]) +
                                               kernel.mu(quad.nodes[i - 1]));
    }

    int n = basis.n_modes;
    SpectralField out(n);
    for (int i = 0; i < quad.n_nodes(); ++i) {
        const std::vector<double>& ui = u_past[static_cast<std::size_t>(i)];
        if (static_cast<int>(ui.size()) != n)
            throw ShapeError("direct_convolution_memory: sample size mismatch");
        kern::axpy(out.data(), quad.weights[i] * k[i], ui.data(), n);
    }
    for (int j = 0; j < n; ++j) out[j] *= basis.lambda[j];
    return out;
}

}  // namespace memodiff
