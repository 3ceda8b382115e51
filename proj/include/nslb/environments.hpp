#ifndef NSLB_ENVIRONMENTS_HPP
#define NSLB_ENVIRONMENTS_HPP

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "nslb/linalg.hpp"

namespace nslb {

using Rng = std::mt19937_64;

/// Deterministic sequence of true parameters theta*_1 .. theta*_T with
/// breakpoint metadata. The generator is pure: same step, same value.
/// At a breakpoint step the new value applies starting at that step.
struct ThetaTrajectory {
    Eigen::Index dim;
    long horizon;
    std::function<Vector(long)> value;  // t in 1..horizon
    std::vector<long> breakpoints;
    double norm_bound;  // S: sup_t ||theta*_t||
};

/// Per-round action-set generator. Every emitted action satisfies
/// ||a|| <= L.
class ActionSetSampler {
  public:
    /// K i.i.d. uniform unit-sphere vectors per round.
    static ActionSetSampler unit_sphere(Eigen::Index d, int num_actions);
    /// The same fixed action set every round.
    static ActionSetSampler fixed(std::vector<Vector> actions);
    /// One context drawn uniformly from each of two pools per round.
    static ActionSetSampler two_pool(std::vector<Vector> pos_pool, std::vector<Vector> neg_pool);

    std::vector<Vector> sample(Rng& rng) const;
    Eigen::Index dim() const { return dim_; }
    double norm_bound() const { return norm_bound_; }

  private:
    ActionSetSampler() = default;
    enum class Mode { unit_sphere, fixed, two_pool } mode_ = Mode::fixed;
    Eigen::Index dim_ = 0;
    int num_actions_ = 0;
    std::vector<Vector> fixed_actions_;
    std::vector<Vector> pos_pool_;
    std::vector<Vector> neg_pool_;
    double norm_bound_ = 1.0;
};

struct NoiseModel {
    double sigma = 1.0;  // standard deviation of the additive Gaussian noise

    double draw(Rng& rng) const;
};

/// One interaction round: the candidate action set, the true parameter,
/// and the best achievable mean reward (the regret oracle).
struct Round {
    std::vector<Vector> actions;
    Vector theta;
    double best_mean;

    double mean_reward(const Vector& a) const { return a.dot(theta); }
};

/// Draws the round-t action set and computes the mean-reward oracle.
/// Rewards are realized separately via `NoiseModel::draw` so that the
/// stream position does not depend on the chosen action.
Round sample_round(const ThetaTrajectory& traj, const ActionSetSampler& sampler, long t, Rng& rng);

/// Piecewise-constant d=2 trajectory with three breakpoints:
/// (1,0) -> (-1,0) at 1000 -> (0,1) at 2000 -> (0,-1) at 3000; T = 6000.
ThetaTrajectory abrupt_scenario();

/// d=2 trajectory moving counter-clockwise on the unit circle from (1,0)
/// to (0,1) over steps 1..3000, then constant; T = 6000.
ThetaTrajectory slowly_varying_scenario();

/// High-dimensional trajectory equal to theta_star until flip_time, after
/// which a seeded draw of ceil(flip_fraction * d) coordinates is negated.
ThetaTrajectory highdim_flip_scenario(const Vector& theta_star, double flip_fraction = 0.6,
                                      long flip_time = 4000, long horizon = 8000,
                                      std::uint64_t flip_seed = 0);

/// Total path length sum_t ||theta*_t - theta*_{t+1}||.
double variation_budget(const ThetaTrajectory& traj);

/// Loads context pools from one CSV file with header f1,...,fd,label and
/// splits rows by the binary label (1 -> first pool, 0 -> second).
ActionSetSampler load_context_pools(const std::string& path);

/// Reads the raw feature rows and labels of a context-pool CSV.
void load_context_csv(const std::string& path, std::vector<Vector>& features,
                      std::vector<double>& labels);

/// Ridge regression of labels on features; ridge = 0 falls back to a
/// least-squares solve.
Vector fit_theta_star(const std::vector<Vector>& features, const std::vector<double>& labels,
                      double ridge);

}  // namespace nslb

#endif
