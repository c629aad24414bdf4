#include "memodiff/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <thread>

#include "memodiff/errors.hpp"
#include "memodiff/kernels.hpp"
#include "memodiff/report_io.hpp"

namespace memodiff {

namespace {

void fill_lambda_pow(const EigenBasis& basis, double r, std::vector<double>& w) {
    w.resize(static_cast<std::size_t>(basis.n_modes));
    for (int j = 0; j < basis.n_modes; ++j) w[j] = std::pow(basis.lambda[j], r);
}

}  // namespace

double mt_norm_sq(const SystemState& z, const ModelConfig& cfg, double sigma) {
    if (sigma < 0.0 || sigma > 1.0)
        throw RangeError("mt_norm_sq: sigma must lie in [0, 1]");
    double eps = cfg.eps.eval(z.t).eps;
    return sobolev_norm_sq(z.u, cfg.basis, sigma) +
           eps * sobolev_norm_sq(z.u, cfg.basis, sigma + 1.0) +
           mu_norm_sq(z.eta, cfg.mu_table, cfg.basis, sigma + 1.0);
}

double mt_dist_sq(const SystemState& a, const SystemState& b,
                  const ModelConfig& cfg, double sigma) {
    if (sigma < 0.0 || sigma > 1.0)
        throw RangeError("mt_dist_sq: sigma must lie in [0, 1]");
    if (std::fabs(a.t - b.t) > 1e-9)
        throw ComparabilityError("mt_dist_sq: states live at different times");
    const EigenBasis& basis = cfg.basis;
    int n = basis.n_modes;

    std::vector<double> wlo, whi, du(static_cast<std::size_t>(n));
    fill_lambda_pow(basis, sigma, wlo);
    fill_lambda_pow(basis, sigma + 1.0, whi);
    for (int j = 0; j < n; ++j) du[j] = a.u[j] - b.u[j];

    double eps = cfg.eps.eval(a.t).eps;
    double out = kern::wsumsq(wlo.data(), du.data(), n) +
                 eps * kern::wsumsq(whi.data(), du.data(), n);

    std::vector<double> drow(static_cast<std::size_t>(n));
    for (int k = 0; k < a.eta.grid->n_nodes(); ++k) {
        double w = cfg.mu_table.wmu[k];
        if (w == 0.0) continue;
        const double* ra = a.eta.row(k);
        const double* rb = b.eta.row(k);
        for (int j = 0; j < n; ++j) drow[j] = ra[j] - rb[j];
        out += w * kern::wsumsq(whi.data(), drow.data(), n);
    }
    return out;
}

double empirical_k2(const Trajectory& traj) {
    double k2 = 0.0;
    for (const TrajectorySample& s : traj.samples)
        k2 = std::max(k2, s.h1 + s.lpp);
    return k2;
}

double gronwall_q(double k2, const ModelConfig& cfg) {
    return (2.0 * cfg.nonlin.l * k2 + cfg.g_norm_sq) / cfg.alpha;
}

EstimateReport dissipative_bound_check(const Trajectory& traj,
                                       const ModelConfig& cfg, double R_init) {
    if (traj.samples.empty())
        throw RangeError("dissipative_bound_check: empty trajectory");
    double Q = gronwall_q(empirical_k2(traj), cfg);
    double m0 = traj.samples.front().mt1;

    EstimateReport rep;
    rep.name = "dissipative-bound";
    if (R_init > 0.0) {
        char buf[48];
        std::snprintf(buf, sizeof buf, "(R = %g)", R_init);
        rep.name += buf;
    }
    for (const TrajectorySample& s : traj.samples)
        rep.add(s.t, s.mt1, std::exp(-cfg.alpha * (s.t - traj.tau)) * m0 + Q);
    rep.finalize(1e-7 * (1.0 + m0));
    return rep;
}

double absorbing_entry_time(double R, double Q, double alpha) {
    if (!(alpha > 0.0))
        throw ConfigError("absorbing_entry_time: alpha must be positive");
    if (!(R > 0.0) || Q < 0.0)
        throw RangeError("absorbing_entry_time: need R > 0 and Q >= 0");
    return std::max(0.0, std::log(R * R / (1.0 + Q)) / alpha);
}

EstimateReport absorbing_check(const std::vector<Trajectory>& trajs,
                               const ModelConfig& cfg, double R, double Q) {
    if (trajs.empty()) throw RangeError("absorbing_check: no trajectories");
    double t0 = absorbing_entry_time(R, Q, cfg.alpha);
    double r0_sq = 2.0 * Q + 1.0;

    EstimateReport rep;
    rep.name = "absorbing-ball";
    for (const Trajectory& traj : trajs)
        for (const TrajectorySample& s : traj.samples)
            if (s.t >= traj.tau + t0 - 1e-12) rep.add(s.t, s.mt1, r0_sq);
    rep.finalize(1e-7 * (1.0 + R * R));
    return rep;
}

ContractionReports contraction_check(const PairTrajectory& pair,
                                     const ModelConfig& cfg) {
    if (pair.samples.empty())
        throw RangeError("contraction_check: empty pair trajectory");
    double d0 = pair.samples.front().d_mt1;
    double l = cfg.nonlin.l;

    ContractionReports out;
    out.uniqueness.name = "uniqueness-growth";
    out.decomposition.name = "contractive-decomposition";

    double psi = 0.0;
    for (std::size_t i = 0; i < pair.samples.size(); ++i) {
        const PairSample& s = pair.samples[i];
        double dt_span = s.t - pair.tau;
        out.uniqueness.add(s.t, s.d_mt1,
                           std::exp(2.0 * l * dt_span) * d0 * (1.0 + 10.0 * cfg.dt));
        if (i > 0) {
            const PairSample& prev = pair.samples[i - 1];
            psi += 0.5 * (s.t - prev.t) * (s.d_grad + prev.d_grad);
        }
        out.decomposition.add(s.t, s.d_mt1,
                              std::exp(-cfg.alpha * dt_span) * d0 + 2.0 * l * psi);
    }
    out.uniqueness.finalize(1e-9 * d0);
    out.decomposition.finalize(1e-6 * d0 + 1e-14);
    return out;
}

double hausdorff_semidistance(const std::vector<SystemState>& B,
                              const std::vector<SystemState>& C,
                              const ModelConfig& cfg, double sigma) {
    if (B.empty() || C.empty())
        throw RangeError("hausdorff_semidistance: sets must be non-empty");
    double t = B.front().t;
    for (const SystemState& z : B)
        if (std::fabs(z.t - t) > 1e-9)
            throw ComparabilityError("hausdorff_semidistance: mixed times in B");
    for (const SystemState& z : C)
        if (std::fabs(z.t - t) > 1e-9)
            throw ComparabilityError("hausdorff_semidistance: mixed times in C");

    double sup = 0.0;
    for (const SystemState& x : B) {
        double inf = std::numeric_limits<double>::infinity();
        for (const SystemState& y : C)
            inf = std::min(inf, mt_dist_sq(x, y, cfg, sigma));
        sup = std::max(sup, inf);
    }
    return std::sqrt(sup);
}

PullbackResult pullback_attractor_approx(double t,
                                         const std::vector<double>& tau_list,
                                         int ensemble_size, double R,
                                         const ModelConfig& cfg, int workers) {
    if (tau_list.empty()) throw RangeError("pullback: tau_list is empty");
    if (ensemble_size < 1) throw RangeError("pullback: ensemble_size must be >= 1");
    if (!(R > 0.0)) throw RangeError("pullback: R must be positive");
    for (std::size_t k = 0; k < tau_list.size(); ++k) {
        if (tau_list[k] > t + 1e-12)
            throw ConfigError("pullback: tau values must not exceed t");
        if (k > 0 && tau_list[k] > tau_list[k - 1] - 1e-12)
            throw ConfigError("pullback: tau_list must be decreasing");
    }

    // Only the endpoints matter here, so sample at the endpoints alone.
    ModelConfig run_cfg = cfg;
    run_cfg.sample_dt = std::max(cfg.sample_dt, 2.0 * (t - tau_list.back()) + 1.0);

    const int K = static_cast<int>(tau_list.size());
    std::vector<std::vector<SystemState>> endpoints(
        static_cast<std::size_t>(K),
        std::vector<SystemState>(static_cast<std::size_t>(ensemble_size)));

    const int n_tasks = K * ensemble_size;
    std::atomic<int> next{0};
    auto work = [&]() {
        for (;;) {
            int id = next.fetch_add(1);
            if (id >= n_tasks) break;
            int k = id / ensemble_size;
            int i = id % ensemble_size;
            double target = R * R * (i + 1.0) / ensemble_size;
            SystemState z0 = seeded_ball_state(run_cfg, tau_list[static_cast<std::size_t>(k)],
                                               i, target);
            endpoints[static_cast<std::size_t>(k)][static_cast<std::size_t>(i)] =
                evolve(z0, t, run_cfg).final_state;
        }
    };

    int n_threads = std::min(workers, n_tasks);
    if (n_threads <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        std::vector<std::exception_ptr> errs(static_cast<std::size_t>(n_threads));
        for (int w = 0; w < n_threads; ++w)
            pool.emplace_back([&, w]() {
                try {
                    work();
                } catch (...) {
                    errs[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        for (std::thread& th : pool) th.join();
        for (const std::exception_ptr& e : errs)
            if (e) std::rethrow_exception(e);
    }

    PullbackResult result;
    result.snapshot.t = t;
    result.snapshot.points = endpoints.back();
    result.snapshot.tau_values = tau_list;
    result.snapshot.radius = R;

    for (int k = 0; k < K; ++k)
        result.deltas.push_back(hausdorff_semidistance(
            endpoints[static_cast<std::size_t>(k)], result.snapshot.points, cfg, 1.0));

    result.report.name = "pullback-convergence";
    double worst = 0.0;
    for (double d : result.deltas) worst = std::max(worst, d);
    for (int k = 0; k < K; ++k) {
        double prev = (k == 0) ? result.deltas[0] : result.deltas[static_cast<std::size_t>(k - 1)];
        result.report.add(tau_list[static_cast<std::size_t>(k)],
                          result.deltas[static_cast<std::size_t>(k)], prev);
    }
    result.report.finalize(1e-8 + 1e-6 * worst);
    return result;
}

void write_snapshot_csv(const std::string& path, const AttractorSnapshot& snap,
                        const ModelConfig& cfg) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    out << "index,tau,u_l2_sq,u_h1_sq,u_h2_sq,eta_mu1_sq,eta_mu2_sq,state_m1_sq\n";
    double tau = snap.tau_values.empty() ? snap.t : snap.tau_values.back();
    for (std::size_t i = 0; i < snap.points.size(); ++i) {
        const SystemState& z = snap.points[i];
        double l2 = sobolev_norm_sq(z.u, cfg.basis, 0.0);
        double h1 = sobolev_norm_sq(z.u, cfg.basis, 1.0);
        double h2 = sobolev_norm_sq(z.u, cfg.basis, 2.0);
        double e1 = mu_norm_sq(z.eta, cfg.mu_table, cfg.basis, 1.0);
        double e2 = mu_norm_sq(z.eta, cfg.mu_table, cfg.basis, 2.0);
        double eps = cfg.eps.eval(z.t).eps;
        out << i << ',' << format_g17(tau) << ',' << format_g17(l2) << ','
            << format_g17(h1) << ',' << format_g17(h2) << ',' << format_g17(e1)
            << ',' << format_g17(e2) << ','
            << format_g17(h1 + eps * h2 + e2) << '\n';
    }
}

}  // namespace memodiff
