#ifndef NSLB_VERIFY_HPP
#define NSLB_VERIFY_HPP

#include <limits>
#include <string>

#include "nslb/harness.hpp"

namespace nslb {

/// Monte Carlo certification of the self-normalized deviation bound:
/// fraction of runs where the confidence ellipsoid missed the true
/// parameter at any step.
struct CoverageReport {
    int runs = 0;
    int failures = 0;
    double empirical_failure_rate = 0.0;
    double delta = 0.0;
    double worst_margin = 0.0;  // min over runs/steps of radius - deviation

    /// delta plus two-sigma binomial slack; the CI acceptance threshold.
    double acceptance_threshold() const;
};

enum class CoverageActionRule {
    optimistic,  // actions chosen by the discounted UCB rule itself
    iid,         // fresh uniform unit-sphere action per step
};

struct CoverageConfig {
    Eigen::Index d = 2;
    long horizon = 300;
    double gamma = 0.95;
    double lambda = 1.0;
    double delta = 0.05;
    double sigma = 1.0;
    int runs = 1000;
    int num_actions = 10;
    CoverageActionRule rule = CoverageActionRule::optimistic;
    std::uint64_t seed = 0;
};

/// Simulates `runs` stationary trajectories with ||theta*|| = S = 1 and a
/// predictable action rule, and checks at every step that
///   ||theta_hat_t - theta*||_{V Vtilde^{-1} V} <= beta_t
/// in normalized coordinates. A run fails if the bound breaks at any step.
CoverageReport coverage_test(const CoverageConfig& cfg);

/// Per-step matrix record of one discounted episode, consumed by the
/// deterministic inequality checks.
struct DlinucbRunTrace {
    double gamma = 1.0;
    double lambda = 1.0;
    double L = 1.0;
    std::vector<Vector> actions;           // A_t, t = 1..T
    std::vector<SpdMatrix> V_pre;          // V_{t-1}, before the step-t update
    std::vector<SpdMatrix> Vtilde_pre;     // Vtilde_{t-1}
    std::vector<SpdMatrix> V_post;         // V_t, after the update
    std::vector<SpdMatrix> Vtilde_post;    // Vtilde_t
    std::optional<std::vector<Vector>> thetas;   // theta*_t when recorded
    std::optional<std::vector<double>> rewards;  // observed rewards when recorded
};

struct SwRunTrace {
    long window = 1;
    double lambda = 1.0;
    double L = 1.0;
    std::vector<Vector> actions;
    std::vector<SpdMatrix> V_pre;  // V_{t-1}
};

/// Records a discounted episode (optimistic action rule on the given
/// trajectory) step by step for the inequality checks.
DlinucbRunTrace record_dlinucb_run(const ThetaTrajectory& traj, const PolicyConfig& cfg,
                                   const ActionSetSampler& sampler, double noise_sigma,
                                   std::uint64_t seed, long horizon = 0);

SwRunTrace record_sw_run(const ThetaTrajectory& traj, const PolicyConfig& cfg,
                         const ActionSetSampler& sampler, double noise_sigma, std::uint64_t seed,
                         long horizon = 0);

struct InequalityReport {
    bool passed = true;
    long first_violation_step = -1;
    std::string violated = "";
    double min_margin = std::numeric_limits<double>::infinity();
};

/// Checks, at every step of a discounted run:
///  (i)  Vtilde <= V in PSD order,
///  (ii) log det(V_t) <= d ln(lambda + L^2 (1-gamma^t)/(d (1-gamma))),
///  (iii) the elliptical-potential sum
///        sum_t min(1, ||A_t||^2_{V^{-1} Vtilde V^{-1}})
///        <= 2d (T ln(1/gamma) + ln(1 + L^2/(d lambda (1-gamma)))).
/// All three hold unconditionally; any violation signals a library bug.
InequalityReport assert_matrix_inequalities(const DlinucbRunTrace& trace);

/// Sliding-window block-potential bound:
/// sum_t min(1, ||A_t||^2_{V_{t-1}^{-1}}) <= 2d ceil(T/l) ln(1 + l L^2/(lambda d)).
InequalityReport assert_sw_inequalities(const SwRunTrace& trace);

struct BiasReport {
    bool passed = true;
    long first_violation_step = -1;
    double max_bias = 0.0;
    double min_margin = std::numeric_limits<double>::infinity();
};

/// Checks, for every t > D, that the surrogate-parameter bias satisfies
///   ||theta*_t - theta_bar_t|| <= sum_{p=t-D}^{t-1} ||theta*_p - theta*_{p+1}||
///                                  + (2 L^2 S / lambda) gamma^D / (1-gamma).
BiasReport bias_diagnostic(const DlinucbRunTrace& trace, long D, double S);

/// Limit-safe right-hand sides of (ii) and (iii); exposed for tests.
double det_bound_log(Eigen::Index d, double lambda, double L, double gamma, long t);
double elliptical_potential_bound(Eigen::Index d, double lambda, double L, double gamma, long T);

}  // namespace nslb

#endif
