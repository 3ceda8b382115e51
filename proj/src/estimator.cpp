#include "nslb/estimator.hpp"

namespace nslb {

DiscountedState DiscountedState::init(Eigen::Index d, double gamma, double lambda) {
    if (gamma <= 0.0 || gamma > 1.0) {
        throw InvalidConfig("DiscountedState: gamma must be in (0, 1]");
    }
    if (lambda <= 0.0) {
        throw InvalidConfig("DiscountedState: lambda must be positive");
    }
    return DiscountedState{gamma,
                           lambda,
                           0,
                           SpdMatrix::scaled_identity(d, lambda),
                           SpdMatrix::scaled_identity(d, lambda),
                           Vector::Zero(d),
                           Vector::Zero(d)};
}

void DiscountedState::update(const Vector& a, double x) {
    if (a.size() != dim()) {
        throw DimensionMismatch("discounted update: action dimension mismatch");
    }
    V.scale(gamma);
    V.add_outer(a);
    V.add_diagonal((1.0 - gamma) * lambda);

    const double g2 = gamma * gamma;
    Vtilde.scale(g2);
    Vtilde.add_outer(a);
    Vtilde.add_diagonal((1.0 - g2) * lambda);

    b = gamma * b + x * a;
    theta_hat = solve(V, b);
    ++t;
}

SlidingWindowState SlidingWindowState::init(Eigen::Index d, long window, double lambda) {
    if (window < 1) {
        throw InvalidConfig("SlidingWindowState: window must be >= 1");
    }
    if (lambda <= 0.0) {
        throw InvalidConfig("SlidingWindowState: lambda must be positive");
    }
    return SlidingWindowState{window, lambda, 0, {}, SpdMatrix::scaled_identity(d, lambda),
                              Vector::Zero(d), Vector::Zero(d)};
}

SpdMatrix SlidingWindowState::rebuild_design() const {
    Matrix m = Matrix::Identity(dim(), dim()) * lambda;
    for (const auto& [a, x] : buffer) {
        m.noalias() += a * a.transpose();
    }
    return SpdMatrix(std::move(m));
}

void SlidingWindowState::update(const Vector& a, double x) {
    if (a.size() != dim()) {
        throw DimensionMismatch("sliding-window update: action dimension mismatch");
    }
    buffer.emplace_back(a, x);
    V.add_outer(a);
    b += x * a;
    if (static_cast<long>(buffer.size()) > window) {
        const auto& [old_a, old_x] = buffer.front();
        V.subtract_outer(old_a);
        b -= old_x * old_a;
        buffer.pop_front();
    }
    if (++steps_since_rebuild >= window) {
        V = rebuild_design();
        steps_since_rebuild = 0;
    }
    theta_hat = solve(V, b);
    ++t;
}

void HistoryLog::append(Vector a, double x) {
    if (thetas.has_value()) {
        throw MissingTruth("HistoryLog: mixing entries with and without true parameters");
    }
    actions.push_back(std::move(a));
    rewards.push_back(x);
}

void HistoryLog::append(Vector a, double x, Vector theta_star) {
    if (!thetas.has_value()) {
        if (!actions.empty()) {
            throw MissingTruth("HistoryLog: mixing entries with and without true parameters");
        }
        thetas.emplace();
    }
    actions.push_back(std::move(a));
    rewards.push_back(x);
    thetas->push_back(std::move(theta_star));
}

Vector batch_wls(const HistoryLog& history, const std::vector<double>& weights, double lambda) {
    if (history.actions.size() != history.rewards.size() ||
        history.actions.size() != weights.size()) {
        throw DimensionMismatch("batch_wls: history and weight lengths differ");
    }
    if (history.actions.empty()) {
        return Vector::Zero(0);
    }
    const Eigen::Index d = history.actions.front().size();
    Matrix v = Matrix::Identity(d, d) * lambda;
    Vector rhs = Vector::Zero(d);
    for (std::size_t s = 0; s < history.actions.size(); ++s) {
        const Vector& a = history.actions[s];
        if (a.size() != d) {
            throw DimensionMismatch("batch_wls: inconsistent action dimensions");
        }
        if (weights[s] <= 0.0) {
            throw InvalidConfig("batch_wls: weights must be positive");
        }
        v.noalias() += weights[s] * a * a.transpose();
        rhs += weights[s] * history.rewards[s] * a;
    }
    return solve(SpdMatrix(std::move(v)), rhs);
}

Vector bar_theta(const HistoryLog& history, double gamma, double lambda, long t) {
    if (!history.thetas.has_value()) {
        throw MissingTruth("bar_theta: history carries no true parameters");
    }
    if (t < 1 || static_cast<std::size_t>(t) > history.thetas->size()) {
        throw InvalidConfig("bar_theta: t out of range");
    }
    const Eigen::Index d = (*history.thetas)[0].size();
    Matrix v = Matrix::Identity(d, d) * lambda;
    Vector rhs = lambda * (*history.thetas)[t - 1];
    for (long s = 1; s < t; ++s) {
        const double w = std::pow(gamma, static_cast<double>(t - 1 - s));
        const Vector& a = history.actions[s - 1];
        v.noalias() += w * a * a.transpose();
        rhs += w * (a.dot((*history.thetas)[s - 1])) * a;
    }
    return solve(SpdMatrix(std::move(v)), rhs);
}

}  // namespace nslb
