#ifndef NSLB_ESTIMATOR_HPP
#define NSLB_ESTIMATOR_HPP

#include <deque>
#include <optional>
#include <vector>

#include "nslb/linalg.hpp"

namespace nslb {

/// Recursive discounted weighted least-squares state in normalized form:
/// all matrices carry time-dependent weights gamma^(t-s), so V keeps the
/// lambda*I floor at every step and nothing overflows for long horizons.
///
/// Update rules:
///   V      <- gamma   * V      + a a' + (1 - gamma)   * lambda * I
///   Vtilde <- gamma^2 * Vtilde + a a' + (1 - gamma^2) * lambda * I
///   b      <- gamma * b + x * a
///   theta_hat = V^{-1} b
///
/// gamma = 1 is admitted and reduces exactly to ridge regression
/// (Vtilde stays equal to V), i.e. the stationary LinUCB estimator.
struct DiscountedState {
    double gamma;
    double lambda;
    long t = 0;
    SpdMatrix V;
    SpdMatrix Vtilde;
    Vector b;
    Vector theta_hat;

    static DiscountedState init(Eigen::Index d, double gamma, double lambda);

    Eigen::Index dim() const { return b.size(); }
    void update(const Vector& a, double x);
};

/// Sliding-window least-squares state: V = sum of the last min(t, l)
/// action outer products + lambda*I. Evicted terms are subtracted and a
/// full rebuild from the buffer happens every l steps to keep the
/// subtraction round-off bounded.
struct SlidingWindowState {
    long window;
    double lambda;
    long t = 0;
    std::deque<std::pair<Vector, double>> buffer;
    SpdMatrix V;
    Vector b;
    Vector theta_hat;

    static SlidingWindowState init(Eigen::Index d, long window, double lambda);

    Eigen::Index dim() const { return b.size(); }
    void update(const Vector& a, double x);

    /// From-scratch recomputation of V from the buffer (also used as the
    /// drift-correction rebuild).
    SpdMatrix rebuild_design() const;

    long steps_since_rebuild = 0;
};

/// Recorded episode history: actions, rewards, and optionally the true
/// parameters (needed by the bias diagnostics).
struct HistoryLog {
    std::vector<Vector> actions;
    std::vector<double> rewards;
    std::optional<std::vector<Vector>> thetas;

    void append(Vector a, double x);
    void append(Vector a, double x, Vector theta_star);
    std::size_t size() const { return actions.size(); }
};

/// Batch weighted ridge solution theta = (sum_s w_s a_s a_s' + lambda I)^{-1}
/// sum_s w_s x_s a_s. This is the direct (non-recursive) oracle the
/// recursive updaters are tested against.
Vector batch_wls(const HistoryLog& history, const std::vector<double>& weights, double lambda);

/// Surrogate parameter theta_bar_t: the drift-weighted average of the true
/// parameters that the discounted estimator actually tracks. Computed in
/// normalized coordinates,
///   theta_bar_t = V_{t-1}^{-1} ( sum_{s<t} gamma^{t-1-s} a_s a_s' theta*_s
///                                + lambda theta*_t )
/// with V_{t-1} = sum_{s<t} gamma^{t-1-s} a_s a_s' + lambda I.
/// Diagnostic only; requires history.thetas.
Vector bar_theta(const HistoryLog& history, double gamma, double lambda, long t);

}  // namespace nslb

#endif
