#include "memodiff/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "memodiff/errors.hpp"
#include "memodiff/kernels.hpp"

namespace memodiff {

namespace {

constexpr double kTwoPi = 6.28318530717958647692;

double frac(double x) { return x - std::floor(x); }

// eta(s) = (1 - exp(-gamma s))/gamma * u: the history accumulated by the
// synthetic decaying past u(tau - s) = exp(-gamma s) * u(tau).
HistoryField exponential_decay_history(const SpectralField& u, double gamma,
                                       std::shared_ptr<const SGrid> grid) {
    HistoryField eta = HistoryField::zeros(std::move(grid), static_cast<int>(u.size()));
    const SGrid& g = *eta.grid;
    for (int k = 1; k <= g.segments; ++k) {
        double factor = (1.0 - std::exp(-gamma * g.nodes[k])) / gamma;
        double* row = eta.row(k);
        for (std::size_t j = 0; j < u.size(); ++j) row[j] = factor * u[j];
    }
    return eta;
}

}  // namespace

EpsilonSpec::Value EpsilonSpec::eval(double t) const {
    if (kind == Kind::Constant) return {eps0, 0.0};
    double sig = 1.0 / (1.0 + std::exp(kappa * t));
    return {eps0 * sig, -kappa * eps0 * sig * (1.0 - sig)};
}

EpsilonSpec EpsilonSpec::logistic(double eps0, double kappa) {
    if (!(eps0 > 0.0)) throw ConfigError("epsilon: eps0 must be positive");
    if (!(kappa > 0.0)) throw ConfigError("epsilon: kappa must be positive");
    EpsilonSpec e;
    e.kind = Kind::Logistic;
    e.eps0 = eps0;
    e.kappa = kappa;
    e.L_bound = eps0 * (1.0 + kappa / 4.0);
    return e;
}

EpsilonSpec EpsilonSpec::constant(double eps0) {
    if (!(eps0 > 0.0)) throw ConfigError("epsilon: eps0 must be positive");
    EpsilonSpec e;
    e.kind = Kind::Constant;
    e.eps0 = eps0;
    e.kappa = 0.0;
    e.L_bound = eps0;
    return e;
}

EpsilonSpec::Value eval_epsilon(const EpsilonSpec& spec, double t) {
    return spec.eval(t);
}

double NonlinearitySpec::eval(double s) const {
    switch (kind) {
        case Kind::Cubic:
            return s * s * s - l * s;
        case Kind::OddPower:
            return std::copysign(std::pow(std::fabs(s), p - 1.0), s) - l * s;
        case Kind::None:
            return 0.0;
    }
    return 0.0;
}

double NonlinearitySpec::fprime(double s) const {
    switch (kind) {
        case Kind::Cubic:
            return 3.0 * s * s - l;
        case Kind::OddPower:
            return (p - 1.0) * std::pow(std::fabs(s), p - 2.0) - l;
        case Kind::None:
            return 0.0;
    }
    return 0.0;
}

double NonlinearitySpec::primitive(double s) const {
    switch (kind) {
        case Kind::Cubic:
            return 0.25 * s * s * s * s - 0.5 * l * s * s;
        case Kind::OddPower:
            return std::pow(std::fabs(s), p) / p - 0.5 * l * s * s;
        case Kind::None:
            return 0.0;
    }
    return 0.0;
}

NonlinearitySpec NonlinearitySpec::cubic(double l) {
    if (l < 0.0) throw ConfigError("nonlinearity: l must be >= 0");
    NonlinearitySpec f;
    f.kind = Kind::Cubic;
    f.l = l;
    f.p = 4.0;
    f.beta1 = 0.5;
    f.gamma1 = 0.5 * l * l;  // sup(l s^2 - s^4/2), attained at s^2 = l
    f.beta2 = 1.0;
    f.gamma2 = 0.0;
    f.tbeta1 = 0.125;
    f.tgamma1 = 0.5 * l * l;  // sup(l s^2/2 - s^4/8), attained at s^2 = 2l
    f.tbeta2 = 0.25;
    f.tgamma2 = 0.0;
    return f;
}

NonlinearitySpec NonlinearitySpec::odd_power(double p, double l) {
    if (!(p >= 2.0)) throw ConfigError("nonlinearity: p must be >= 2");
    if (l < 0.0) throw ConfigError("nonlinearity: l must be >= 0");
    NonlinearitySpec f;
    f.kind = Kind::OddPower;
    f.l = l;
    f.p = p;
    f.beta1 = 0.5;
    f.beta2 = 1.0;
    f.gamma2 = 0.0;
    f.tbeta1 = 0.5 / p;
    f.tbeta2 = 1.0 / p;
    f.tgamma2 = 0.0;
    if (l > 0.0 && p > 2.0) {
        // gamma1 = sup(l x^2 - x^p/2) at x^{p-2} = 2l/... solved analytically
        double x1 = std::pow(4.0 * l / p, 1.0 / (p - 2.0));
        f.gamma1 = std::max(0.0, l * x1 * x1 - 0.5 * std::pow(x1, p));
        double x2 = std::pow(2.0 * l, 1.0 / (p - 2.0));
        f.tgamma1 = std::max(0.0, 0.5 * l * x2 * x2 - std::pow(x2, p) / (2.0 * p));
    } else if (l > 0.0 && p == 2.0) {
        // f(s)s = (1 - l) s^2: the floor beta1 s^2 - gamma1 needs l <= 1/2
        if (l > 0.5)
            throw ConfigError("nonlinearity: odd_power with p = 2 needs l <= 1/2");
        f.gamma1 = 0.0;
        f.tgamma1 = 0.0;
    }
    return f;
}

NonlinearitySpec NonlinearitySpec::none() {
    NonlinearitySpec f;
    f.kind = Kind::None;
    f.l = 0.0;
    f.p = 2.0;
    f.h2_conformant = false;  // no growth floor; comparison runs only
    return f;
}

void NonlinearitySpec::validate() const {
    if (std::fabs(eval(0.0)) > 1e-12)
        throw ConfigError("nonlinearity: f(0) must vanish");
    const int n = 2001;
    for (int i = 0; i < n; ++i) {
        double s = -10.0 + 20.0 * i / (n - 1);
        if (fprime(s) < -l - 1e-9)
            throw ConfigError("nonlinearity: f' dips below -l at s = " +
                              std::to_string(s));
        if (!h2_conformant) continue;
        double fs = eval(s) * s;
        double sp = std::pow(std::fabs(s), p);
        double slack = 1e-9 * (1.0 + sp);
        if (fs < beta1 * sp - gamma1 - slack || fs > beta2 * sp + gamma2 + slack)
            throw ConfigError("nonlinearity: growth envelope fails at s = " +
                              std::to_string(s));
        double F = primitive(s);
        if (F < tbeta1 * sp - tgamma1 - slack || F > tbeta2 * sp + tgamma2 + slack)
            throw ConfigError("nonlinearity: primitive envelope fails at s = " +
                              std::to_string(s));
    }
}

void eval_nonlinearity(const NonlinearitySpec& f, std::vector<double>& values) {
    switch (f.kind) {
        case NonlinearitySpec::Kind::Cubic:
            for (double& v : values) v = v * v * v - f.l * v;
            break;
        case NonlinearitySpec::Kind::OddPower:
            for (double& v : values)
                v = std::copysign(std::pow(std::fabs(v), f.p - 1.0), v) - f.l * v;
            break;
        case NonlinearitySpec::Kind::None:
            std::fill(values.begin(), values.end(), 0.0);
            break;
    }
}

double eval_nonlinearity(const NonlinearitySpec& f, double s) { return f.eval(s); }

void finalize_model(ModelConfig& cfg) {
    if (!cfg.grid) throw ConfigError("model: missing s-grid");
    if (static_cast<int>(cfg.g.size()) != cfg.basis.n_modes)
        throw ShapeError("model: forcing size does not match basis");
    cfg.mu_table = tabulate_kernel(cfg.kernel, *cfg.grid);
    cfg.g_norm_sq = kern::sumsq(cfg.g.data(), cfg.g.size());
    cfg.lambda_tilde = cfg.basis.lambda[0];
    cfg.L = cfg.eps.L_bound;
    cfg.rho = cfg.kernel.rho;
    if (!(cfg.L > 0.0)) throw ConfigError("model: L bound must be positive");
    cfg.alpha = std::min({cfg.lambda_tilde / 2.0, 1.0 / (2.0 * cfg.L), cfg.rho});
    cfg.alpha_strong = std::min({cfg.lambda_tilde, 1.0 / cfg.L, cfg.rho});
    if (!(cfg.dt > 0.0)) throw ConfigError("model: dt must be positive");
    if (cfg.dt > cfg.grid->s_max)
        throw ConfigError("model: dt must not exceed the history horizon");
    if (!(cfg.sample_dt > 0.0)) throw ConfigError("model: sample_dt must be positive");
    if (!(cfg.varrho > 0.0) || cfg.varrho > cfg.kernel.delta + 1e-12)
        throw ConfigError("model: varrho must lie in (0, delta]");
}

namespace {

// Scratch-carrying stepper so the hot loop does not reallocate.
struct Stepper {
    const ModelConfig& cfg;
    std::vector<double> phys;
    SpectralField fhat, mem, rhs, u_next;
    HistoryField eta_buf;

    explicit Stepper(const ModelConfig& cfg)
        : cfg(cfg),
          fhat(cfg.basis.n_modes),
          mem(cfg.basis.n_modes),
          rhs(cfg.basis.n_modes),
          u_next(cfg.basis.n_modes) {}

    void advance(SystemState& z, double dt, long step_index) {
        const EigenBasis& b = cfg.basis;
        int n = b.n_modes;

        if (cfg.nonlin.kind != NonlinearitySpec::Kind::None) {
            to_physical_into(z.u, b, phys);
            eval_nonlinearity(cfg.nonlin, phys);
            from_physical_into(phys, b, fhat);
        } else {
            std::fill(fhat.coeffs.begin(), fhat.coeffs.end(), 0.0);
        }

        std::fill(mem.coeffs.begin(), mem.coeffs.end(), 0.0);
        if (!cfg.kernel.is_zero()) {
            for (int k = 0; k < z.eta.grid->n_nodes(); ++k) {
                double w = cfg.mu_table.wmu[k];
                if (w != 0.0) kern::axpy(mem.data(), w, z.eta.row(k), n);
            }
            for (int j = 0; j < n; ++j) mem[j] *= b.lambda[j];
        }

        double eps_next = cfg.eps.eval(z.t + dt).eps;
        for (int j = 0; j < n; ++j)
            rhs[j] = (1.0 + eps_next * b.lambda[j]) * z.u[j] +
                     dt * (cfg.g[j] - mem[j] - fhat[j]);
        kern::diag_solve(u_next.data(), rhs.data(), 1.0, eps_next + dt,
                         b.lambda.data(), n);

        for (int j = 0; j < n; ++j)
            if (!std::isfinite(u_next[j]))
                throw DivergenceError("solution diverged (non-finite mode " +
                                          std::to_string(j + 1) + " at t = " +
                                          std::to_string(z.t + dt) + ")",
                                      step_index, z.t + dt);

        advance_history_into(z.eta, u_next, dt, cfg.interp, eta_buf);
        z.u.coeffs.swap(u_next.coeffs);
        z.eta.data.swap(eta_buf.data);
        z.t += dt;
    }
};

}  // namespace

SystemState step(const SystemState& z, double dt, const ModelConfig& cfg,
                 long step_index) {
    Stepper s(cfg);
    SystemState out = z;
    s.advance(out, dt, step_index);
    return out;
}

TrajectorySample probe_state(const SystemState& z, const ModelConfig& cfg) {
    TrajectorySample s;
    s.t = z.t;
    s.u = z.u.coeffs;
    s.l2 = sobolev_norm_sq(z.u, cfg.basis, 0.0);
    s.h1 = sobolev_norm_sq(z.u, cfg.basis, 1.0);
    s.h2 = sobolev_norm_sq(z.u, cfg.basis, 2.0);
    s.eta1 = mu_norm_sq(z.eta, cfg.mu_table, cfg.basis, 1.0);
    s.eta2 = mu_norm_sq(z.eta, cfg.mu_table, cfg.basis, 2.0);
    s.eps = cfg.eps.eval(z.t).eps;
    s.mt0 = s.l2 + s.eps * s.h1 + s.eta1;
    s.mt1 = s.h1 + s.eps * s.h2 + s.eta2;
    std::vector<double> phys = to_physical(z.u, cfg.basis);
    s.lpp = lp_norm_p(phys, cfg.basis, cfg.nonlin.p);
    return s;
}

Trajectory evolve(const SystemState& z_tau, double t_end, const ModelConfig& cfg) {
    if (t_end < z_tau.t - 1e-12)
        throw ConfigError("evolve: t_end precedes the initial time");
    long n_steps = std::lround((t_end - z_tau.t) / cfg.dt);
    long stride = std::max(1L, std::lround(cfg.sample_dt / cfg.dt));

    Trajectory traj;
    traj.tau = z_tau.t;
    traj.dt = cfg.dt;
    traj.samples.reserve(static_cast<std::size_t>(n_steps / stride) + 2);

    SystemState z = z_tau;
    Stepper stepper(cfg);
    traj.samples.push_back(probe_state(z, cfg));
    for (long i = 1; i <= n_steps; ++i) {
        stepper.advance(z, cfg.dt, i);
        if (i % stride == 0 || i == n_steps) traj.samples.push_back(probe_state(z, cfg));
    }
    traj.final_state = std::move(z);
    return traj;
}

namespace {

PairSample probe_pair(const SystemState& za, const SystemState& zb,
                      const ModelConfig& cfg, std::vector<double>& du,
                      std::vector<double>& drow) {
    const EigenBasis& b = cfg.basis;
    int n = b.n_modes;
    du.resize(n);
    for (int j = 0; j < n; ++j) du[j] = za.u[j] - zb.u[j];

    PairSample s;
    s.t = za.t;
    s.d_grad = kern::wsumsq(b.lambda.data(), du.data(), n);
    double dh2 = kern::wsumsq(b.lambda2.data(), du.data(), n);

    double deta2 = 0.0;
    if (!cfg.kernel.is_zero()) {
        drow.resize(n);
        for (int k = 0; k < za.eta.grid->n_nodes(); ++k) {
            double w = cfg.mu_table.wmu[k];
            if (w == 0.0) continue;
            kern::blend2_axpy(drow.data(), 1.0, za.eta.row(k), -1.0, zb.eta.row(k), 0.0,
                              za.eta.row(k), n);
            deta2 += w * kern::wsumsq(b.lambda2.data(), drow.data(), n);
        }
    }
    double eps = cfg.eps.eval(za.t).eps;
    s.d_mt1 = s.d_grad + eps * dh2 + deta2;
    return s;
}

}  // namespace

PairTrajectory evolve_pair(const SystemState& za, const SystemState& zb, double t_end,
                           const ModelConfig& cfg) {
    if (std::fabs(za.t - zb.t) > 1e-12)
        throw ComparabilityError("evolve_pair: states start at different times");
    long n_steps = std::lround((t_end - za.t) / cfg.dt);
    long stride = std::max(1L, std::lround(cfg.sample_dt / cfg.dt));

    PairTrajectory traj;
    traj.tau = za.t;
    traj.dt = cfg.dt;

    SystemState a = za, bst = zb;
    Stepper sa(cfg), sb(cfg);
    std::vector<double> du, drow;
    traj.samples.push_back(probe_pair(a, bst, cfg, du, drow));
    for (long i = 1; i <= n_steps; ++i) {
        sa.advance(a, cfg.dt, i);
        sb.advance(bst, cfg.dt, i);
        if (i % stride == 0 || i == n_steps)
            traj.samples.push_back(probe_pair(a, bst, cfg, du, drow));
    }
    traj.final_a = std::move(a);
    traj.final_b = std::move(bst);
    return traj;
}

SystemState default_initial_state(const ModelConfig& cfg, double tau) {
    SystemState z;
    z.t = tau;
    z.u = SpectralField(cfg.basis.n_modes);
    z.u[0] = 1.0;
    z.eta = exponential_decay_history(z.u, 1.0, cfg.grid);
    return z;
}

SystemState zero_state(const ModelConfig& cfg, double tau) {
    SystemState z;
    z.t = tau;
    z.u = SpectralField(cfg.basis.n_modes);
    z.eta = HistoryField::zeros(cfg.grid, cfg.basis.n_modes);
    return z;
}

SpectralField seeded_direction(const EigenBasis& basis, int index) {
    int n = basis.n_modes;
    int lead = std::min(8, n);
    SpectralField u(n);
    for (int j = 0; j < lead; ++j) {
        double rj = frac(0.6180339887498949 * (j + 1));
        u[j] = std::sin(kTwoPi * (index + 0.5) * rj) / (j + 1);
    }
    if (kern::sumsq(u.data(), n) < 1e-12) u[0] = 1.0;
    return u;
}

SystemState seeded_ball_state(const ModelConfig& cfg, double tau, int index,
                              double target_norm_sq) {
    if (!(target_norm_sq > 0.0))
        throw RangeError("seeded_ball_state: target norm must be positive");
    SpectralField u = seeded_direction(cfg.basis, index);
    double gamma = 0.5 + 1.5 * frac(0.7548776662466927 * (index + 1));
    SystemState z;
    z.t = tau;
    z.eta = exponential_decay_history(u, gamma, cfg.grid);
    z.u = std::move(u);

    double h1 = sobolev_norm_sq(z.u, cfg.basis, 1.0);
    double h2 = sobolev_norm_sq(z.u, cfg.basis, 2.0);
    double eta2 = mu_norm_sq(z.eta, cfg.mu_table, cfg.basis, 2.0);
    double eps = cfg.eps.eval(tau).eps;
    double current = h1 + eps * h2 + eta2;
    double scale = std::sqrt(target_norm_sq / current);
    for (double& c : z.u.coeffs) c *= scale;
    for (double& v : z.eta.data) v *= scale;
    return z;
}

}  // namespace memodiff
