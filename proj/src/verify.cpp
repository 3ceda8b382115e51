#include "nslb/verify.hpp"

#include <cmath>

namespace nslb {

double CoverageReport::acceptance_threshold() const {
    return delta + 2.0 * std::sqrt(delta * (1.0 - delta) / static_cast<double>(runs));
}

double det_bound_log(Eigen::Index d, double lambda, double L, double gamma, long t) {
    const double dd = static_cast<double>(d);
    // sum_{k=0}^{t-1} gamma^k, with its limit t at gamma = 1
    const double geom = (1.0 - gamma) < 1e-12
                            ? static_cast<double>(t)
                            : (1.0 - std::pow(gamma, static_cast<double>(t))) / (1.0 - gamma);
    return dd * std::log(lambda + L * L * geom / dd);
}

double elliptical_potential_bound(Eigen::Index d, double lambda, double L, double gamma, long T) {
    const double dd = static_cast<double>(d);
    const double TT = static_cast<double>(T);
    if (1.0 - gamma < 1e-12) {
        return 2.0 * dd * std::log1p(L * L * TT / (dd * lambda));
    }
    return 2.0 * dd *
           (TT * std::log(1.0 / gamma) + std::log1p(L * L / (dd * lambda * (1.0 - gamma))));
}

CoverageReport coverage_test(const CoverageConfig& cfg) {
    if (cfg.runs < 1 || cfg.horizon < 1 || cfg.d < 1) {
        throw InvalidConfig("coverage_test: runs, horizon, and d must be positive");
    }
    PolicyConfig pcfg;
    pcfg.delta = cfg.delta;
    pcfg.sigma = cfg.sigma;
    pcfg.d = cfg.d;
    pcfg.lambda = cfg.lambda;
    pcfg.L = 1.0;
    pcfg.S = 1.0;
    pcfg.gamma = cfg.gamma;
    pcfg.validate();

    CoverageReport report;
    report.runs = cfg.runs;
    report.delta = cfg.delta;
    report.worst_margin = std::numeric_limits<double>::infinity();

    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int run = 0; run < cfg.runs; ++run) {
        Rng rng = make_stream(cfg.seed, static_cast<std::uint64_t>(run), 0);

        Vector theta_star(cfg.d);
        double norm = 0.0;
        do {
            for (Eigen::Index i = 0; i < cfg.d; ++i) {
                theta_star[i] = gauss(rng);
            }
            norm = theta_star.norm();
        } while (norm < 1e-12);
        theta_star /= norm;  // ||theta*|| = S = 1

        const ActionSetSampler sampler = ActionSetSampler::unit_sphere(cfg.d, cfg.num_actions);
        DiscountedState state = DiscountedState::init(cfg.d, cfg.gamma, cfg.lambda);
        bool run_failed = false;
        for (long t = 1; t <= cfg.horizon; ++t) {
            std::vector<Vector> actions = sampler.sample(rng);
            Vector chosen;
            if (cfg.rule == CoverageActionRule::optimistic) {
                const ArmDecision decision =
                    select_action(state, actions, beta_dlinucb(state.t, pcfg));
                chosen = actions[decision.chosen_index];
            } else {
                chosen = actions.front();
            }
            const double reward = chosen.dot(theta_star) + cfg.sigma * gauss(rng);
            state.update(chosen, reward);

            const Vector diff = state.theta_hat - theta_star;
            const Vector vdiff = state.V.matrix() * diff;
            const double deviation = std::sqrt(std::max(quad_form_inv(state.Vtilde, vdiff), 0.0));
            const double margin = beta_dlinucb(state.t, pcfg) - deviation;
            report.worst_margin = std::min(report.worst_margin, margin);
            if (margin < 0.0) {
                run_failed = true;
            }
        }
        if (run_failed) {
            ++report.failures;
        }
    }
    report.empirical_failure_rate =
        static_cast<double>(report.failures) / static_cast<double>(report.runs);
    return report;
}

DlinucbRunTrace record_dlinucb_run(const ThetaTrajectory& traj, const PolicyConfig& cfg,
                                   const ActionSetSampler& sampler, double noise_sigma,
                                   std::uint64_t seed, long horizon) {
    if (!cfg.gamma.has_value()) {
        throw InvalidConfig("record_dlinucb_run: gamma is required");
    }
    const long T = horizon > 0 ? horizon : traj.horizon;
    Rng rng = make_stream(seed, 0, 0);
    const NoiseModel noise{noise_sigma};

    DlinucbRunTrace trace;
    trace.gamma = *cfg.gamma;
    trace.lambda = cfg.lambda;
    trace.L = cfg.L;
    trace.thetas.emplace();
    trace.rewards.emplace();

    DiscountedState state = DiscountedState::init(traj.dim, *cfg.gamma, cfg.lambda);
    for (long t = 1; t <= T; ++t) {
        const Round round = sample_round(traj, sampler, t, rng);
        const ArmDecision decision = select_action(state, round.actions, beta_dlinucb(state.t, cfg));
        const Vector& chosen = round.actions[decision.chosen_index];
        const double reward = round.mean_reward(chosen) + noise.draw(rng);

        trace.V_pre.push_back(state.V);
        trace.Vtilde_pre.push_back(state.Vtilde);
        state.update(chosen, reward);
        trace.V_post.push_back(state.V);
        trace.Vtilde_post.push_back(state.Vtilde);
        trace.actions.push_back(chosen);
        trace.thetas->push_back(round.theta);
        trace.rewards->push_back(reward);
    }
    return trace;
}

SwRunTrace record_sw_run(const ThetaTrajectory& traj, const PolicyConfig& cfg,
                         const ActionSetSampler& sampler, double noise_sigma, std::uint64_t seed,
                         long horizon) {
    if (!cfg.window.has_value()) {
        throw InvalidConfig("record_sw_run: window is required");
    }
    const long T = horizon > 0 ? horizon : traj.horizon;
    Rng rng = make_stream(seed, 0, 0);
    const NoiseModel noise{noise_sigma};

    SwRunTrace trace;
    trace.window = *cfg.window;
    trace.lambda = cfg.lambda;
    trace.L = cfg.L;

    SlidingWindowState state = SlidingWindowState::init(traj.dim, *cfg.window, cfg.lambda);
    for (long t = 1; t <= T; ++t) {
        const Round round = sample_round(traj, sampler, t, rng);
        const ArmDecision decision =
            select_action(state, round.actions, beta_swlinucb(state.t, cfg));
        const Vector& chosen = round.actions[decision.chosen_index];
        const double reward = round.mean_reward(chosen) + noise.draw(rng);

        trace.V_pre.push_back(state.V);
        state.update(chosen, reward);
        trace.actions.push_back(chosen);
    }
    return trace;
}

namespace {

void record_violation(InequalityReport& report, long step, const std::string& which) {
    if (report.passed) {
        report.passed = false;
        report.first_violation_step = step;
        report.violated = which;
    }
}

}  // namespace

InequalityReport assert_matrix_inequalities(const DlinucbRunTrace& trace) {
    InequalityReport report;
    const auto T = static_cast<long>(trace.actions.size());
    if (T == 0) {
        return report;  // vacuously true
    }
    const Eigen::Index d = trace.actions.front().size();

    double potential = 0.0;
    for (long t = 1; t <= T; ++t) {
        const SpdMatrix& v = trace.V_post[t - 1];
        const SpdMatrix& vt = trace.Vtilde_post[t - 1];

        if (!psd_dominates(v, vt, psd_default_tol(v))) {
            record_violation(report, t, "psd_order");
        }

        const double det_margin = det_bound_log(d, trace.lambda, trace.L, trace.gamma, t) -
                                  log_det(v);
        report.min_margin = std::min(report.min_margin, det_margin);
        if (det_margin < 0.0) {
            record_violation(report, t, "determinant");
        }

        const Vector u = solve(trace.V_pre[t - 1], trace.actions[t - 1]);
        const double norm_sq = u.dot(trace.Vtilde_pre[t - 1].matrix() * u);
        potential += std::min(1.0, std::max(norm_sq, 0.0));
    }

    const double pot_bound = elliptical_potential_bound(d, trace.lambda, trace.L, trace.gamma, T);
    const double pot_margin = pot_bound - potential;
    report.min_margin = std::min(report.min_margin, pot_margin);
    if (pot_margin < 0.0) {
        record_violation(report, T, "elliptical_potential");
    }
    return report;
}

InequalityReport assert_sw_inequalities(const SwRunTrace& trace) {
    InequalityReport report;
    const auto T = static_cast<long>(trace.actions.size());
    if (T == 0) {
        return report;
    }
    const Eigen::Index d = trace.actions.front().size();
    const double dd = static_cast<double>(d);

    double potential = 0.0;
    for (long t = 1; t <= T; ++t) {
        potential += std::min(1.0, quad_form_inv(trace.V_pre[t - 1], trace.actions[t - 1]));
    }
    const auto blocks = static_cast<double>((T + trace.window - 1) / trace.window);
    const double bound =
        2.0 * dd * blocks *
        std::log1p(static_cast<double>(trace.window) * trace.L * trace.L / (trace.lambda * dd));
    report.min_margin = bound - potential;
    if (report.min_margin < 0.0) {
        record_violation(report, T, "sw_block_potential");
    }
    return report;
}

BiasReport bias_diagnostic(const DlinucbRunTrace& trace, long D, double S) {
    if (!trace.thetas.has_value() || !trace.rewards.has_value()) {
        throw MissingTruth("bias_diagnostic: trace carries no true parameters");
    }
    if (D < 1) {
        throw InvalidConfig("bias_diagnostic: D must be >= 1");
    }
    if (trace.gamma >= 1.0) {
        throw InvalidConfig("bias_diagnostic: requires gamma < 1");
    }

    HistoryLog history;
    for (std::size_t s = 0; s < trace.actions.size(); ++s) {
        history.append(trace.actions[s], (*trace.rewards)[s], (*trace.thetas)[s]);
    }

    const double tail = 2.0 * trace.L * trace.L * S / trace.lambda *
                        std::pow(trace.gamma, static_cast<double>(D)) / (1.0 - trace.gamma);
    BiasReport report;
    const auto T = static_cast<long>(trace.actions.size());
    for (long t = D + 1; t <= T; ++t) {
        const Vector theta_bar = bar_theta(history, trace.gamma, trace.lambda, t);
        const double bias = ((*trace.thetas)[t - 1] - theta_bar).norm();
        double drift = 0.0;
        for (long p = t - D; p < t; ++p) {
            drift += ((*trace.thetas)[p - 1] - (*trace.thetas)[p]).norm();
        }
        const double margin = drift + tail - bias;
        report.max_bias = std::max(report.max_bias, bias);
        report.min_margin = std::min(report.min_margin, margin);
        if (margin < 0.0 && report.passed) {
            report.passed = false;
            report.first_violation_step = t;
        }
    }
    return report;
}

}  // namespace nslb
