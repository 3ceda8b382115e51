#include "nslb/environments.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

namespace nslb {

ActionSetSampler ActionSetSampler::unit_sphere(Eigen::Index d, int num_actions) {
    if (d < 1 || num_actions < 1) {
        throw InvalidConfig("unit_sphere sampler: d and K must be positive");
    }
    ActionSetSampler s;
    s.mode_ = Mode::unit_sphere;
    s.dim_ = d;
    s.num_actions_ = num_actions;
    s.norm_bound_ = 1.0;
    return s;
}

ActionSetSampler ActionSetSampler::fixed(std::vector<Vector> actions) {
    if (actions.empty()) {
        throw EmptyActionSet("fixed sampler: no actions");
    }
    ActionSetSampler s;
    s.mode_ = Mode::fixed;
    s.dim_ = actions.front().size();
    s.norm_bound_ = 0.0;
    for (const auto& a : actions) {
        if (a.size() != s.dim_) {
            throw DimensionMismatch("fixed sampler: inconsistent action dimensions");
        }
        s.norm_bound_ = std::max(s.norm_bound_, a.norm());
    }
    s.fixed_actions_ = std::move(actions);
    return s;
}

ActionSetSampler ActionSetSampler::two_pool(std::vector<Vector> pos_pool,
                                            std::vector<Vector> neg_pool) {
    if (pos_pool.empty() || neg_pool.empty()) {
        throw EmptyPool("two_pool sampler: both pools must be nonempty");
    }
    ActionSetSampler s;
    s.mode_ = Mode::two_pool;
    s.dim_ = pos_pool.front().size();
    s.norm_bound_ = 0.0;
    for (const auto* pool : {&pos_pool, &neg_pool}) {
        for (const auto& a : *pool) {
            if (a.size() != s.dim_) {
                throw DimensionMismatch("two_pool sampler: inconsistent context dimensions");
            }
            s.norm_bound_ = std::max(s.norm_bound_, a.norm());
        }
    }
    s.pos_pool_ = std::move(pos_pool);
    s.neg_pool_ = std::move(neg_pool);
    return s;
}

std::vector<Vector> ActionSetSampler::sample(Rng& rng) const {
    switch (mode_) {
        case Mode::fixed:
            return fixed_actions_;
        case Mode::unit_sphere: {
            std::normal_distribution<double> gauss(0.0, 1.0);
            std::vector<Vector> actions(num_actions_);
            for (auto& a : actions) {
                a.resize(dim_);
                double norm = 0.0;
                do {
                    for (Eigen::Index i = 0; i < dim_; ++i) {
                        a[i] = gauss(rng);
                    }
                    norm = a.norm();
                } while (norm < 1e-12);
                a /= norm;
            }
            return actions;
        }
        case Mode::two_pool: {
            std::uniform_int_distribution<std::size_t> pos_idx(0, pos_pool_.size() - 1);
            std::uniform_int_distribution<std::size_t> neg_idx(0, neg_pool_.size() - 1);
            return {pos_pool_[pos_idx(rng)], neg_pool_[neg_idx(rng)]};
        }
    }
    throw std::logic_error("unreachable sampler mode");
}

double NoiseModel::draw(Rng& rng) const {
    if (sigma < 0.0) {
        throw InvalidConfig("NoiseModel: sigma must be nonnegative");
    }
    if (sigma == 0.0) {
        return 0.0;
    }
    std::normal_distribution<double> gauss(0.0, sigma);
    return gauss(rng);
}

Round sample_round(const ThetaTrajectory& traj, const ActionSetSampler& sampler, long t,
                   Rng& rng) {
    if (t < 1 || t > traj.horizon) {
        throw InvalidConfig("sample_round: step out of horizon");
    }
    Round round;
    round.actions = sampler.sample(rng);
    round.theta = traj.value(t);
    round.best_mean = -std::numeric_limits<double>::infinity();
    for (const auto& a : round.actions) {
        round.best_mean = std::max(round.best_mean, a.dot(round.theta));
    }
    return round;
}

ThetaTrajectory abrupt_scenario() {
    ThetaTrajectory traj;
    traj.dim = 2;
    traj.horizon = 6000;
    traj.breakpoints = {1000, 2000, 3000};
    traj.norm_bound = 1.0;
    traj.value = [](long t) -> Vector {
        Vector theta(2);
        if (t < 1000) {
            theta << 1.0, 0.0;
        } else if (t < 2000) {
            theta << -1.0, 0.0;
        } else if (t < 3000) {
            theta << 0.0, 1.0;
        } else {
            theta << 0.0, -1.0;
        }
        return theta;
    };
    return traj;
}

ThetaTrajectory slowly_varying_scenario() {
    ThetaTrajectory traj;
    traj.dim = 2;
    traj.horizon = 6000;
    traj.norm_bound = 1.0;
    traj.value = [](long t) -> Vector {
        const long drift_end = 3000;
        const double phase = std::numbers::pi / 2.0 *
                             static_cast<double>(std::min(t, drift_end) - 1) /
                             static_cast<double>(drift_end - 1);
        Vector theta(2);
        theta << std::cos(phase), std::sin(phase);
        return theta;
    };
    return traj;
}

ThetaTrajectory highdim_flip_scenario(const Vector& theta_star, double flip_fraction,
                                      long flip_time, long horizon, std::uint64_t flip_seed) {
    if (flip_fraction < 0.0 || flip_fraction > 1.0) {
        throw InvalidConfig("highdim_flip_scenario: flip_fraction must be in [0, 1]");
    }
    const Eigen::Index d = theta_star.size();
    const auto n_flip = static_cast<Eigen::Index>(
        std::ceil(flip_fraction * static_cast<double>(d) - 1e-12));

    std::vector<Eigen::Index> indices(d);
    std::iota(indices.begin(), indices.end(), 0);
    Rng rng(flip_seed ^ 0x9e3779b97f4a7c15ULL);
    std::shuffle(indices.begin(), indices.end(), rng);

    Vector flipped = theta_star;
    for (Eigen::Index i = 0; i < n_flip; ++i) {
        flipped[indices[i]] = -flipped[indices[i]];
    }

    ThetaTrajectory traj;
    traj.dim = d;
    traj.horizon = horizon;
    traj.norm_bound = theta_star.norm();
    if (n_flip > 0) {
        traj.breakpoints = {flip_time};
    }
    traj.value = [theta_star, flipped, flip_time, n_flip](long t) -> Vector {
        return (n_flip > 0 && t >= flip_time) ? flipped : theta_star;
    };
    return traj;
}

double variation_budget(const ThetaTrajectory& traj) {
    double budget = 0.0;
    Vector prev = traj.value(1);
    for (long t = 2; t <= traj.horizon; ++t) {
        Vector cur = traj.value(t);
        budget += (cur - prev).norm();
        prev = std::move(cur);
    }
    return budget;
}

void load_context_csv(const std::string& path, std::vector<Vector>& features,
                      std::vector<double>& labels) {
    std::ifstream in(path);
    if (!in) {
        throw ParseError("cannot open context CSV: " + path, 0);
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw ParseError("empty context CSV: " + path, 0);
    }
    const auto n_cols = static_cast<Eigen::Index>(std::count(line.begin(), line.end(), ',')) + 1;
    if (n_cols < 2) {
        throw ParseError("context CSV needs at least one feature column and a label", 1);
    }
    const Eigen::Index d = n_cols - 1;

    long row = 1;
    while (std::getline(in, line)) {
        ++row;
        if (line.empty()) {
            continue;
        }
        std::stringstream ss(line);
        std::string field;
        Vector f(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            if (!std::getline(ss, field, ',')) {
                throw ParseError("missing feature column in " + path, row);
            }
            try {
                f[i] = std::stod(field);
            } catch (const std::exception&) {
                throw ParseError("non-numeric feature '" + field + "' in " + path, row);
            }
        }
        if (!std::getline(ss, field, ',')) {
            throw ParseError("missing label column in " + path, row);
        }
        double label = 0.0;
        try {
            label = std::stod(field);
        } catch (const std::exception&) {
            throw ParseError("non-numeric label '" + field + "' in " + path, row);
        }
        if (label != 0.0 && label != 1.0) {
            throw ParseError("label must be 0 or 1 in " + path, row);
        }
        features.push_back(std::move(f));
        labels.push_back(label);
    }
}

ActionSetSampler load_context_pools(const std::string& path) {
    std::vector<Vector> features;
    std::vector<double> labels;
    load_context_csv(path, features, labels);
    std::vector<Vector> pos, neg;
    for (std::size_t i = 0; i < features.size(); ++i) {
        (labels[i] == 1.0 ? pos : neg).push_back(std::move(features[i]));
    }
    if (pos.empty() || neg.empty()) {
        throw EmptyPool("context CSV " + path + " does not contain both label classes");
    }
    return ActionSetSampler::two_pool(std::move(pos), std::move(neg));
}

Vector fit_theta_star(const std::vector<Vector>& features, const std::vector<double>& labels,
                      double ridge) {
    if (features.size() != labels.size()) {
        throw DimensionMismatch("fit_theta_star: feature and label counts differ");
    }
    if (features.empty()) {
        throw EmptyPool("fit_theta_star: no data");
    }
    if (ridge < 0.0) {
        throw InvalidConfig("fit_theta_star: ridge must be nonnegative");
    }
    const Eigen::Index d = features.front().size();
    const auto n = static_cast<Eigen::Index>(features.size());
    Matrix x(n, d);
    Vector y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (features[i].size() != d) {
            throw DimensionMismatch("fit_theta_star: inconsistent feature dimensions");
        }
        x.row(i) = features[i].transpose();
        y[i] = labels[i];
    }
    if (ridge == 0.0) {
        return x.colPivHouseholderQr().solve(y);
    }
    Matrix gram = x.transpose() * x;
    gram.diagonal().array() += ridge;
    return solve(SpdMatrix(std::move(gram)), x.transpose() * y);
}

}  // namespace nslb
