#pragma once

#include <string>
#include <vector>

#include "memodiff/dynamics.hpp"
#include "memodiff/report.hpp"

namespace memodiff {

// Squared norm of the time-dependent state space at the state's own time:
// |u|_sigma^2 + eps(t) |u|_{sigma+1}^2 + |eta|_{mu,sigma+1}^2, sigma in [0,1].
double mt_norm_sq(const SystemState& z, const ModelConfig& cfg, double sigma);

// Same quadratic form applied to the difference of two states sharing t.
double mt_dist_sq(const SystemState& a, const SystemState& b,
                  const ModelConfig& cfg, double sigma);

// sup over the run of |grad u|^2 + |u|_p^p; feeds the Gronwall constant.
double empirical_k2(const Trajectory& traj);

// Q = (2 l K2 + |g|^2) / alpha.
double gronwall_q(double k2, const ModelConfig& cfg);

// Checks |z(t)|^2 <= e^{-alpha (t-tau)} |z(tau)|^2 + Q at every stored sample,
// in the sigma = 1 norm, with Q computed from this run's own K2. R_init is
// recorded in the report name when positive (provenance only).
EstimateReport dissipative_bound_check(const Trajectory& traj,
                                       const ModelConfig& cfg,
                                       double R_init = 0.0);

// t0 = max{0, ln(R^2 / (1 + Q)) / alpha}.
double absorbing_entry_time(double R, double Q, double alpha);

// Every trajectory that started inside the R-ball must sit inside the ball of
// squared radius 2Q + 1 once t >= tau + t0. Q is the pooled constant of the
// whole family.
EstimateReport absorbing_check(const std::vector<Trajectory>& trajs,
                               const ModelConfig& cfg, double R, double Q);

// Two difference bounds along one pair of trajectories:
//  - uniqueness:    d(t) <= e^{2l (t-tau)} d(tau) (1 + 10 dt)
//  - decomposition: d(t) <= e^{-alpha (t-tau)} d(tau) + 2l int_tau^t dgrad dr
// with d the squared sigma = 1 difference norm and the integral a trapezoid
// over the stored samples. The 10 dt factor absorbs the first-order scheme's
// defect on the otherwise tight Gronwall bound.
struct ContractionReports {
    EstimateReport uniqueness;
    EstimateReport decomposition;
};
ContractionReports contraction_check(const PairTrajectory& pair,
                                     const ModelConfig& cfg);

// sup_{x in B} inf_{y in C} of the sigma-norm distance; both sets non-empty
// and at a common time.
double hausdorff_semidistance(const std::vector<SystemState>& B,
                              const std::vector<SystemState>& C,
                              const ModelConfig& cfg, double sigma);

// Endpoints of an ensemble evolved to a common observation time, kept with
// the pullback times and ball radius that produced them.
struct AttractorSnapshot {
    double t = 0.0;
    std::vector<SystemState> points;
    std::vector<double> tau_values;
    double radius = 0.0;
};

// Evolves ensemble_size ball states from every tau in tau_list (decreasing)
// to time t. The snapshot holds the endpoints of the most negative tau; the
// report is the sequence delta_t(endpoints(tau_k), snapshot), which must be
// non-increasing within tolerance. workers > 1 distributes the independent
// trajectories over threads; results are slot-indexed so the output does not
// depend on scheduling.
struct PullbackResult {
    AttractorSnapshot snapshot;
    EstimateReport report;
    std::vector<double> deltas;
};
PullbackResult pullback_attractor_approx(double t,
                                         const std::vector<double>& tau_list,
                                         int ensemble_size, double R,
                                         const ModelConfig& cfg,
                                         int workers = 1);

// Columns: index, tau, then the endpoint's component norms and sigma = 1 norm.
void write_snapshot_csv(const std::string& path, const AttractorSnapshot& snap,
                        const ModelConfig& cfg);

}  // namespace memodiff
