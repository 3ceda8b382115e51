#ifndef NSLB_POLICIES_HPP
#define NSLB_POLICIES_HPP

#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "nslb/estimator.hpp"

namespace nslb {

enum class SwRadius {
    corrected,  // union-bound radius with log(T/delta)
    legacy,     // log(1/delta), as in the original sliding-window proposal
};

/// Every constant entering the confidence radius, plus the forgetting
/// parameter (discount factor or window length) of the adaptive policies.
struct PolicyConfig {
    double delta = 0.05;   // confidence level
    double sigma = 1.0;    // subgaussian noise constant
    Eigen::Index d = 2;    // dimension
    double lambda = 1.0;   // regularization
    double L = 1.0;        // action-norm bound
    double S = 1.0;        // parameter-norm bound
    std::optional<double> gamma;   // discount factor in (0, 1]
    std::optional<long> window;    // sliding-window length
    std::optional<long> horizon;   // required by the corrected SW radius
    SwRadius sw_radius = SwRadius::corrected;

    void validate() const;
};

/// Intermediate quantities of one arm selection, exposed for tests and
/// trace emission.
struct ArmDecision {
    std::size_t chosen_index = 0;
    std::vector<double> ucb_values;
    double beta = 0.0;
    std::vector<double> exploration_bonus;
};

/// Confidence radius of the discounted policy after t absorbed updates:
/// sqrt(lambda)*S + sigma*sqrt(2 ln(1/delta)
///                             + d ln(1 + L^2(1-gamma^{2t})/(lambda d (1-gamma^2)))).
/// At gamma = 1 the ratio (1-gamma^{2t})/(1-gamma^2) is evaluated as its
/// limit t.
double beta_dlinucb(long t, const PolicyConfig& cfg);

/// Confidence radius of the sliding-window policy:
/// sqrt(lambda)*S + sigma*sqrt(2 ln(T/delta) + d ln(1 + L^2 min(t,l)/(lambda d))).
/// With sw_radius = legacy the leading log is ln(1/delta) instead.
double beta_swlinucb(long t, const PolicyConfig& cfg);

/// Optimistic selection: argmax over actions of
///   a' theta_hat + beta * sqrt(a' V^{-1} Vtilde V^{-1} a)
/// with lowest-index tie-break. Deterministic.
ArmDecision select_action(const DiscountedState& state, const std::vector<Vector>& actions,
                          double beta);

/// Sliding-window variant; the bonus is beta * sqrt(a' V^{-1} a).
ArmDecision select_action(const SlidingWindowState& state, const std::vector<Vector>& actions,
                          double beta);

/// Horizon tuning of the discount factor: 1 - (B_T/(dT))^{2/3}, clamped
/// to [0.5, 1 - 1e-6].
double tune_gamma(double variation_budget, Eigen::Index d, long horizon);

/// Horizon tuning of the window length: round((dT/B_T)^{2/3}), clamped to
/// [1, T].
long tune_window(double variation_budget, Eigen::Index d, long horizon);

/// Budget-free window tuning: round(d^{2/3} T^{2/3}), clamped to [1, T].
long tune_window_unknown(Eigen::Index d, long horizon);

/// Uniform policy interface driven by the harness: receive an action set,
/// pick an arm, absorb the observed reward.
class Policy {
  public:
    virtual ~Policy() = default;
    virtual ArmDecision select(const std::vector<Vector>& actions) = 0;
    virtual void update(const Vector& a, double x) = 0;
    virtual void reset() = 0;
    virtual const std::string& name() const = 0;
    virtual Vector theta_hat() const = 0;
};

using PolicyFactory = std::function<std::unique_ptr<Policy>()>;

/// Discounted optimistic policy. gamma = 1 is the stationary LinUCB
/// baseline (same code path, so the equivalence is exact).
class DLinUcbPolicy : public Policy {
  public:
    DLinUcbPolicy(PolicyConfig cfg, std::string name = "dlinucb");

    ArmDecision select(const std::vector<Vector>& actions) override;
    void update(const Vector& a, double x) override;
    void reset() override;
    const std::string& name() const override { return name_; }
    Vector theta_hat() const override { return state_.theta_hat; }

    const DiscountedState& state() const { return state_; }
    const PolicyConfig& config() const { return cfg_; }

  private:
    PolicyConfig cfg_;
    std::string name_;
    DiscountedState state_;
    bool warned_norm_ = false;
};

/// Sliding-window optimistic policy.
class SwLinUcbPolicy : public Policy {
  public:
    explicit SwLinUcbPolicy(PolicyConfig cfg);

    ArmDecision select(const std::vector<Vector>& actions) override;
    void update(const Vector& a, double x) override;
    void reset() override;
    const std::string& name() const override { return name_; }
    Vector theta_hat() const override { return state_.theta_hat; }

    const SlidingWindowState& state() const { return state_; }

  private:
    PolicyConfig cfg_;
    std::string name_;
    SlidingWindowState state_;
    bool warned_norm_ = false;
};

/// Stationary LinUCB, implemented as the gamma = 1 special case of the
/// discounted policy.
std::unique_ptr<Policy> make_linucb(PolicyConfig cfg);

/// Oracle-restart wrapper: after each listed step the inner policy is
/// replaced by a fresh instance; otherwise fully transparent.
class OracleRestartPolicy : public Policy {
  public:
    OracleRestartPolicy(PolicyFactory factory, std::vector<long> breakpoints,
                        std::string name = "linucb-or");

    ArmDecision select(const std::vector<Vector>& actions) override;
    void update(const Vector& a, double x) override;
    void reset() override;
    const std::string& name() const override { return name_; }
    Vector theta_hat() const override { return inner_->theta_hat(); }

  private:
    PolicyFactory factory_;
    std::vector<long> breakpoints_;
    std::string name_;
    std::unique_ptr<Policy> inner_;
    long t_ = 0;
    std::size_t next_break_ = 0;
};

}  // namespace nslb

#endif
