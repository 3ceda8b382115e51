#include "nslb/policies.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>

namespace nslb {

void PolicyConfig::validate() const {
    if (!(delta > 0.0 && delta < 1.0)) {
        throw InvalidConfig("PolicyConfig: delta must be in (0, 1)");
    }
    if (sigma < 0.0) {
        throw InvalidConfig("PolicyConfig: sigma must be nonnegative");
    }
    if (d < 1) {
        throw InvalidConfig("PolicyConfig: d must be positive");
    }
    if (lambda <= 0.0) {
        throw InvalidConfig("PolicyConfig: lambda must be positive");
    }
    if (L <= 0.0 || S <= 0.0) {
        throw InvalidConfig("PolicyConfig: L and S must be positive");
    }
    if (gamma.has_value() && window.has_value()) {
        throw InvalidConfig("PolicyConfig: gamma and window are mutually exclusive");
    }
    if (gamma.has_value() && !(*gamma > 0.0 && *gamma <= 1.0)) {
        throw InvalidConfig("PolicyConfig: gamma must be in (0, 1]");
    }
    if (window.has_value() && *window < 1) {
        throw InvalidConfig("PolicyConfig: window must be >= 1");
    }
}

double beta_dlinucb(long t, const PolicyConfig& cfg) {
    if (!cfg.gamma.has_value()) {
        throw InvalidConfig("beta_dlinucb: gamma is not set");
    }
    const double g = *cfg.gamma;
    const double denom = 1.0 - g * g;
    // (1 - gamma^{2t}) / (1 - gamma^2), with its t -> limit at gamma = 1.
    const double ratio = denom < 1e-12
                             ? static_cast<double>(t)
                             : (1.0 - std::pow(g, 2.0 * static_cast<double>(t))) / denom;
    const double dd = static_cast<double>(cfg.d);
    const double log_term = dd * std::log1p(cfg.L * cfg.L * ratio / (cfg.lambda * dd));
    return std::sqrt(cfg.lambda) * cfg.S +
           cfg.sigma * std::sqrt(2.0 * std::log(1.0 / cfg.delta) + log_term);
}

double beta_swlinucb(long t, const PolicyConfig& cfg) {
    if (!cfg.window.has_value()) {
        throw InvalidConfig("beta_swlinucb: window is not set");
    }
    if (cfg.sw_radius == SwRadius::corrected && !cfg.horizon.has_value()) {
        throw InvalidConfig("beta_swlinucb: horizon is required for the corrected radius");
    }
    const double eff = static_cast<double>(std::min(t, *cfg.window));
    const double dd = static_cast<double>(cfg.d);
    const double log_term = dd * std::log1p(cfg.L * cfg.L * eff / (cfg.lambda * dd));
    const double tail = cfg.sw_radius == SwRadius::corrected
                            ? std::log(static_cast<double>(*cfg.horizon) / cfg.delta)
                            : std::log(1.0 / cfg.delta);
    return std::sqrt(cfg.lambda) * cfg.S + cfg.sigma * std::sqrt(2.0 * tail + log_term);
}

namespace {

template <typename BonusSq>
ArmDecision pick(const std::vector<Vector>& actions, Eigen::Index d, double beta,
                 BonusSq&& bonus_sq, const Vector& theta_hat) {
    if (actions.empty()) {
        throw EmptyActionSet("select_action: empty action set");
    }
    ArmDecision decision;
    decision.beta = beta;
    decision.ucb_values.reserve(actions.size());
    decision.exploration_bonus.reserve(actions.size());
    double best = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < actions.size(); ++i) {
        const Vector& a = actions[i];
        if (a.size() != d) {
            throw DimensionMismatch("select_action: action dimension mismatch");
        }
        const double bonus = beta * std::sqrt(std::max(bonus_sq(a), 0.0));
        const double ucb = a.dot(theta_hat) + bonus;
        decision.exploration_bonus.push_back(bonus);
        decision.ucb_values.push_back(ucb);
        if (ucb > best) {
            best = ucb;
            decision.chosen_index = i;
        }
    }
    return decision;
}

}  // namespace

ArmDecision select_action(const DiscountedState& state, const std::vector<Vector>& actions,
                          double beta) {
    const Cholesky chol(state.V);
    return pick(
        actions, state.dim(), beta,
        [&](const Vector& a) {
            const Vector u = chol.solve(a);
            return u.dot(state.Vtilde.matrix() * u);
        },
        state.theta_hat);
}

ArmDecision select_action(const SlidingWindowState& state, const std::vector<Vector>& actions,
                          double beta) {
    const Cholesky chol(state.V);
    return pick(
        actions, state.dim(), beta, [&](const Vector& a) { return a.dot(chol.solve(a)); },
        state.theta_hat);
}

double tune_gamma(double variation_budget, Eigen::Index d, long horizon) {
    constexpr double gamma_min = 0.5;
    constexpr double gamma_max = 1.0 - 1e-6;
    if (variation_budget <= 0.0) {
        return gamma_max;
    }
    const double ratio = variation_budget / (static_cast<double>(d) * static_cast<double>(horizon));
    const double g = 1.0 - std::pow(ratio, 2.0 / 3.0);
    return std::clamp(g, gamma_min, gamma_max);
}

long tune_window(double variation_budget, Eigen::Index d, long horizon) {
    if (variation_budget <= 0.0) {
        return horizon;
    }
    const double ratio = static_cast<double>(d) * static_cast<double>(horizon) / variation_budget;
    const long l = std::lround(std::pow(ratio, 2.0 / 3.0));
    return std::clamp(l, 1L, horizon);
}

long tune_window_unknown(Eigen::Index d, long horizon) {
    const double l = std::pow(static_cast<double>(d) * static_cast<double>(horizon), 2.0 / 3.0);
    return std::clamp(std::lround(l), 1L, horizon);
}

namespace {

void warn_action_norm(const Vector& a, double L, bool& warned, const std::string& name) {
    if (!warned && a.norm() > L * (1.0 + 1e-12)) {
        std::cerr << "[nslb] warning: " << name << " received action with norm " << a.norm()
                  << " exceeding L = " << L << "; accepted anyway\n";
        warned = true;
    }
}

}  // namespace

DLinUcbPolicy::DLinUcbPolicy(PolicyConfig cfg, std::string name)
    : cfg_(std::move(cfg)),
      name_(std::move(name)),
      state_(DiscountedState::init(1, 1.0, 1.0)) {
    cfg_.validate();
    if (!cfg_.gamma.has_value()) {
        throw InvalidConfig("DLinUcbPolicy: gamma is required");
    }
    state_ = DiscountedState::init(cfg_.d, *cfg_.gamma, cfg_.lambda);
}

ArmDecision DLinUcbPolicy::select(const std::vector<Vector>& actions) {
    return select_action(state_, actions, beta_dlinucb(state_.t, cfg_));
}

void DLinUcbPolicy::update(const Vector& a, double x) {
    warn_action_norm(a, cfg_.L, warned_norm_, name_);
    state_.update(a, x);
}

void DLinUcbPolicy::reset() {
    state_ = DiscountedState::init(cfg_.d, *cfg_.gamma, cfg_.lambda);
}

SwLinUcbPolicy::SwLinUcbPolicy(PolicyConfig cfg)
    : cfg_(std::move(cfg)), name_("swlinucb"), state_(SlidingWindowState::init(1, 1, 1.0)) {
    cfg_.validate();
    if (!cfg_.window.has_value()) {
        throw InvalidConfig("SwLinUcbPolicy: window is required");
    }
    state_ = SlidingWindowState::init(cfg_.d, *cfg_.window, cfg_.lambda);
}

ArmDecision SwLinUcbPolicy::select(const std::vector<Vector>& actions) {
    return select_action(state_, actions, beta_swlinucb(state_.t, cfg_));
}

void SwLinUcbPolicy::update(const Vector& a, double x) {
    warn_action_norm(a, cfg_.L, warned_norm_, name_);
    state_.update(a, x);
}

void SwLinUcbPolicy::reset() {
    state_ = SlidingWindowState::init(cfg_.d, *cfg_.window, cfg_.lambda);
}

std::unique_ptr<Policy> make_linucb(PolicyConfig cfg) {
    cfg.window.reset();
    cfg.gamma = 1.0;
    return std::make_unique<DLinUcbPolicy>(std::move(cfg), "linucb");
}

OracleRestartPolicy::OracleRestartPolicy(PolicyFactory factory, std::vector<long> breakpoints,
                                         std::string name)
    : factory_(std::move(factory)), breakpoints_(std::move(breakpoints)), name_(std::move(name)) {
    for (std::size_t i = 1; i < breakpoints_.size(); ++i) {
        if (breakpoints_[i] <= breakpoints_[i - 1]) {
            throw InvalidConfig("OracleRestartPolicy: breakpoints must be strictly increasing");
        }
    }
    inner_ = factory_();
}

ArmDecision OracleRestartPolicy::select(const std::vector<Vector>& actions) {
    return inner_->select(actions);
}

void OracleRestartPolicy::update(const Vector& a, double x) {
    inner_->update(a, x);
    ++t_;
    if (next_break_ < breakpoints_.size() && t_ == breakpoints_[next_break_]) {
        inner_ = factory_();
        ++next_break_;
    }
}

void OracleRestartPolicy::reset() {
    inner_ = factory_();
    t_ = 0;
    next_break_ = 0;
}

}  // namespace nslb
