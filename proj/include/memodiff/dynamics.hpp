#pragma once

#include <memory>
#include <vector>

#include "memodiff/memory.hpp"
#include "memodiff/spectral.hpp"

// Time-stepping layer for the mode-truncated system
//
//   (1 + eps(t) lambda_j) du_j/dt + lambda_j u_j + lambda_j m_j + fhat_j = ghat_j,
//   m_j = integral mu(s) eta_j(s) ds,   eta advected by eta_t = -eta_s + u.
//
// One step treats the stiff diagonal part implicitly (with eps frozen at the
// new time) and the memory and nonlinear terms explicitly:
//
//   u^{n+1}_j = [(1 + eps*lambda_j) u^n_j + dt (g_j - lambda_j m^n_j - f^n_j)]
//               / (1 + eps*lambda_j + dt*lambda_j),
//
// then the history is shifted along characteristics with u^{n+1} as source.

namespace memodiff {

struct EpsilonSpec {
    enum class Kind { Logistic, Constant };

    Kind kind = Kind::Logistic;
    double eps0 = 1.0;
    double kappa = 1.0;
    double L_bound = 0.0;  // declared sup(|eps| + |eps'|)

    struct Value {
        double eps;
        double deps;
    };
    Value eval(double t) const;

    bool autonomous() const { return kind == Kind::Constant; }

    // eps(t) = eps0 / (1 + exp(kappa*t)): positive, strictly decreasing, -> 0.
    static EpsilonSpec logistic(double eps0, double kappa);
    // eps(t) = eps0; comparison mode only (the decay hypothesis fails).
    static EpsilonSpec constant(double eps0);
};

struct NonlinearitySpec {
    enum class Kind { Cubic, OddPower, None };

    Kind kind = Kind::Cubic;
    double l = 0.0;  // dissipation defect: f' >= -l everywhere
    double p = 4.0;  // growth exponent of f(s)*s

    // growth envelope beta1|s|^p - gamma1 <= f(s)s <= beta2|s|^p + gamma2
    double beta1 = 0.0, beta2 = 0.0, gamma1 = 0.0, gamma2 = 0.0;
    // the same envelope for the primitive F(s) = integral_0^s f
    double tbeta1 = 0.0, tbeta2 = 0.0, tgamma1 = 0.0, tgamma2 = 0.0;

    // false for the f == 0 comparison kind, which has no growth floor
    bool h2_conformant = true;

    double eval(double s) const;
    double fprime(double s) const;
    double primitive(double s) const;

    // Throws ConfigError if the declared constants fail on a dense sample.
    void validate() const;

    static NonlinearitySpec cubic(double l);
    static NonlinearitySpec odd_power(double p, double l);
    static NonlinearitySpec none();
};

// f applied pointwise to physical values (in place).
void eval_nonlinearity(const NonlinearitySpec& f, std::vector<double>& values);
double eval_nonlinearity(const NonlinearitySpec& f, double s);

EpsilonSpec::Value eval_epsilon(const EpsilonSpec& spec, double t);

// Fully-built model: basis, grids, kernels and the derived decay constants.
struct ModelConfig {
    EigenBasis basis;
    std::shared_ptr<const SGrid> grid;
    MemoryKernel kernel;
    MuTable mu_table;
    EpsilonSpec eps;
    NonlinearitySpec nonlin;
    SpectralField g;
    double g_norm_sq = 0.0;

    double dt = 1e-3;
    double t_end = 10.0;
    double sample_dt = 0.1;
    InterpOrder interp = InterpOrder::Cubic;
    double tail_tol = 1e-10;
    double varrho = 1.0;         // admissible-history decay rate (<= delta)
    double history_bound = 1e4;  // admissible-history size bound

    // derived decay constants
    double lambda_tilde = 0.0;   // = lambda_1
    double L = 0.0;              // = eps.L_bound
    double rho = 0.0;            // = kernel.rho
    double alpha = 0.0;          // min{lambda_tilde/2, 1/(2L), rho}
    double alpha_strong = 0.0;   // min{lambda_tilde, 1/L, rho}
};

// Recomputes the derived constants and cached kernel table; call after any
// manual field change.
void finalize_model(ModelConfig& cfg);

struct SystemState {
    double t = 0.0;
    SpectralField u;
    HistoryField eta;
};

// One semi-implicit step.  step_index is only used to label divergence errors.
SystemState step(const SystemState& z, double dt, const ModelConfig& cfg,
                 long step_index = -1);

struct TrajectorySample {
    double t = 0.0;
    std::vector<double> u;  // mode coefficients
    double l2 = 0.0;        // ||u||_0^2
    double h1 = 0.0;        // ||u||_1^2
    double h2 = 0.0;        // ||u||_2^2
    double eta1 = 0.0;      // ||eta||^2_{mu,1}
    double eta2 = 0.0;      // ||eta||^2_{mu,2}
    double mt0 = 0.0;       // ||z||^2 in the time-dependent base space
    double mt1 = 0.0;       // ||z||^2 in the stronger space
    double eps = 0.0;       // eps(t)
    double lpp = 0.0;       // ||u||_p^p (growth-exponent p of f)
};

struct Trajectory {
    double tau = 0.0;
    double dt = 0.0;
    std::vector<TrajectorySample> samples;
    SystemState final_state;
};

TrajectorySample probe_state(const SystemState& z, const ModelConfig& cfg);

// Integrates z from z.t to t_end with cfg.dt, sampling every cfg.sample_dt.
// Throws DivergenceError (with step index) if the state leaves the finite
// range.  t_end is snapped to the nearest whole number of steps.
Trajectory evolve(const SystemState& z_tau, double t_end, const ModelConfig& cfg);

// Difference diagnostics for a pair of solutions of the same model.
struct PairSample {
    double t = 0.0;
    double d_mt1 = 0.0;   // ||z_a - z_b||^2 in the stronger space
    double d_grad = 0.0;  // ||grad(u_a - u_b)||^2
};

struct PairTrajectory {
    double tau = 0.0;
    double dt = 0.0;
    std::vector<PairSample> samples;
    SystemState final_a, final_b;
};

PairTrajectory evolve_pair(const SystemState& za, const SystemState& zb, double t_end,
                           const ModelConfig& cfg);

// Canonical initial state: u = w_1, history built from the synthetic decaying
// past u(tau - s) = exp(-s) u(tau), evaluated in closed form on the grid.
SystemState default_initial_state(const ModelConfig& cfg, double tau);

// u = 0, eta = 0 at time tau.
SystemState zero_state(const ModelConfig& cfg, double tau);

// Deterministic low-discrepancy direction number `index`: golden-ratio phases
// over the leading (up to 8) modes with 1/j amplitude decay. Unnormalized.
SpectralField seeded_direction(const EigenBasis& basis, int index);

// Deterministic ensemble member `index` (low-discrepancy directions in the
// leading modes, exponential-decay admissible history), scaled so that
// ||z||^2 in the stronger space at time tau equals target_norm_sq.
SystemState seeded_ball_state(const ModelConfig& cfg, double tau, int index,
                              double target_norm_sq);

}  // namespace memodiff
