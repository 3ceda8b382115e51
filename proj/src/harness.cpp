#include "nslb/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

namespace nslb {

namespace {

constexpr const char* kLibraryVersion = "0.1.0";

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string csv_quote(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) {
        return field;
    }
    std::string quoted = "\"";
    for (char c : field) {
        if (c == '"') {
            quoted += '"';
        }
        quoted += c;
    }
    quoted += '"';
    return quoted;
}

}  // namespace

std::unique_ptr<Policy> PolicySpec::instantiate() const {
    if (kind == "dlinucb") {
        return std::make_unique<DLinUcbPolicy>(config);
    }
    if (kind == "swlinucb") {
        return std::make_unique<SwLinUcbPolicy>(config);
    }
    if (kind == "linucb") {
        return make_linucb(config);
    }
    if (kind == "linucb-or") {
        PolicyConfig inner = config;
        return std::make_unique<OracleRestartPolicy>(
            [inner] { return make_linucb(inner); }, restart_breakpoints);
    }
    throw ConfigError("unknown policy kind: " + kind);
}

void ExperimentConfig::validate() const {
    if (replications < 1) {
        throw ConfigError("replications must be >= 1");
    }
    if (policies.empty()) {
        throw ConfigError("at least one policy is required");
    }
    for (const auto& spec : policies) {
        spec.config.validate();
    }
    if (noise_sigma < 0.0) {
        throw ConfigError("noise sigma must be nonnegative");
    }
    if (num_actions < 1) {
        throw ConfigError("num_actions must be >= 1");
    }
}

Rng make_stream(std::uint64_t base_seed, std::uint64_t replication, std::uint64_t role) {
    std::seed_seq seq{base_seed, replication, role};
    return Rng(seq);
}

RegretTrace run_episode(Policy& policy, const ThetaTrajectory& traj,
                        const ActionSetSampler& sampler, const NoiseModel& noise,
                        std::uint64_t base_seed, std::uint64_t replication, long horizon,
                        long theta_stride) {
    if (sampler.dim() != traj.dim) {
        throw DimensionMismatch("run_episode: sampler and trajectory dimensions differ");
    }
    const long T = horizon > 0 ? horizon : traj.horizon;
    Rng env_rng = make_stream(base_seed, replication, 0);

    RegretTrace trace;
    trace.instantaneous.reserve(T);
    trace.cumulative.reserve(T);
    trace.chosen_index.reserve(T);
    double cumulative = 0.0;
    for (long t = 1; t <= T; ++t) {
        try {
            const Round round = sample_round(traj, sampler, t, env_rng);
            const ArmDecision decision = policy.select(round.actions);
            const Vector& chosen = round.actions[decision.chosen_index];
            const double reward = round.mean_reward(chosen) + noise.draw(env_rng);
            policy.update(chosen, reward);

            const double regret = round.best_mean - round.mean_reward(chosen);
            cumulative += regret;
            trace.instantaneous.push_back(regret);
            trace.cumulative.push_back(cumulative);
            trace.chosen_index.push_back(decision.chosen_index);
            if (theta_stride > 0 && t % theta_stride == 0) {
                trace.theta_snapshots.emplace_back(t, policy.theta_hat());
            }
        } catch (const std::exception& e) {
            throw std::runtime_error("episode failed at step " + std::to_string(t) + ": " +
                                     e.what());
        }
    }
    return trace;
}

unsigned harness_thread_cap() {
    if (const char* env = std::getenv("NONSTAT_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v >= 1) {
            return static_cast<unsigned>(v);
        }
    }
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? hw : 1;
}

namespace {

// Nearest-rank quantile: value of 1-based rank ceil(p * N) in the sorted
// sample.
double nearest_rank(std::vector<double>& values, double p) {
    const auto n = static_cast<double>(values.size());
    auto rank = static_cast<std::size_t>(std::ceil(p * n));
    rank = std::clamp<std::size_t>(rank, 1, values.size());
    std::nth_element(values.begin(), values.begin() + (rank - 1), values.end());
    return values[rank - 1];
}

}  // namespace

AggregateResult run_replications(const ExperimentConfig& cfg, const ThetaTrajectory& traj,
                                 const ActionSetSampler& sampler) {
    cfg.validate();
    const long T = cfg.horizon > 0 ? cfg.horizon : traj.horizon;
    const NoiseModel noise{cfg.noise_sigma};

    AggregateResult result;
    result.horizon = T;
    result.replications = cfg.replications;

    struct Task {
        const PolicySpec* spec;
        int replication;
        RegretTrace* out;
    };
    std::vector<Task> tasks;
    for (const auto& spec : cfg.policies) {
        const std::string name = spec.kind;
        if (result.per_policy.contains(name)) {
            throw ConfigError("duplicate policy kind in config: " + name);
        }
        result.policy_names.push_back(name);
        result.per_policy[name] = {};
        auto& reps = result.traces[name];
        reps.resize(cfg.replications);
        for (int i = 0; i < cfg.replications; ++i) {
            tasks.push_back(Task{&spec, i, &reps[i]});
        }
    }

    const long stride = cfg.emit_theta_trace ? cfg.theta_stride : 0;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::string failure_message;
    std::mutex failure_mutex;

    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size() || failed.load()) {
                return;
            }
            const Task& task = tasks[i];
            try {
                auto policy = task.spec->instantiate();
                *task.out = run_episode(*policy, traj, sampler, noise, cfg.base_seed,
                                        static_cast<std::uint64_t>(task.replication), T, stride);
            } catch (const std::exception& e) {
                std::scoped_lock lock(failure_mutex);
                failed.store(true);
                if (failure_message.empty()) {
                    failure_message = task.spec->kind + " replication " +
                                      std::to_string(task.replication) + ": " + e.what();
                }
            }
        }
    };

    const unsigned n_threads = std::min<std::size_t>(harness_thread_cap(), tasks.size());
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> threads;
        threads.reserve(n_threads);
        for (unsigned i = 0; i < n_threads; ++i) {
            threads.emplace_back(worker);
        }
        for (auto& th : threads) {
            th.join();
        }
    }
    if (failed.load()) {
        throw std::runtime_error("experiment failed: " + failure_message);
    }

    for (const auto& name : result.policy_names) {
        const auto& reps = result.traces.at(name);
        PolicyAggregate agg;
        agg.mean_cumulative.resize(T);
        agg.q05.resize(T);
        agg.q95.resize(T);
        std::vector<double> column(reps.size());
        for (long t = 0; t < T; ++t) {
            double sum = 0.0;
            for (std::size_t r = 0; r < reps.size(); ++r) {
                column[r] = reps[r].cumulative[t];
                sum += column[r];
            }
            agg.mean_cumulative[t] = sum / static_cast<double>(reps.size());
            std::vector<double> scratch = column;
            agg.q05[t] = nearest_rank(scratch, 0.05);
            scratch = column;
            agg.q95[t] = nearest_rank(scratch, 0.95);
        }
        agg.final_mean = agg.mean_cumulative.back();
        result.per_policy[name] = std::move(agg);
    }
    return result;
}

std::pair<ThetaTrajectory, ActionSetSampler> build_scenario(const ExperimentConfig& cfg) {
    if (cfg.scenario == "abrupt") {
        ThetaTrajectory traj = abrupt_scenario();
        return {traj, ActionSetSampler::unit_sphere(traj.dim, cfg.num_actions)};
    }
    if (cfg.scenario == "slow") {
        ThetaTrajectory traj = slowly_varying_scenario();
        return {traj, ActionSetSampler::unit_sphere(traj.dim, cfg.num_actions)};
    }
    if (cfg.scenario == "highdim-flip") {
        // Synthetic d=50 stand-in for the dataset experiment: random unit
        // parameter, contexts split into positively and negatively aligned
        // unit-sphere pools.
        const Eigen::Index d = 50;
        Rng rng = make_stream(cfg.base_seed, 0, 42);
        std::normal_distribution<double> gauss(0.0, 1.0);
        Vector theta(d);
        for (Eigen::Index i = 0; i < d; ++i) {
            theta[i] = gauss(rng);
        }
        theta /= theta.norm();
        ThetaTrajectory traj = highdim_flip_scenario(theta, 0.6, 4000, 8000, cfg.base_seed);

        const std::size_t pool_size = 1000;
        std::vector<Vector> pos, neg;
        while (pos.size() < pool_size || neg.size() < pool_size) {
            Vector c(d);
            for (Eigen::Index i = 0; i < d; ++i) {
                c[i] = gauss(rng);
            }
            c /= c.norm();
            auto& pool = c.dot(theta) >= 0.0 ? pos : neg;
            if (pool.size() < pool_size) {
                pool.push_back(std::move(c));
            }
        }
        return {traj, ActionSetSampler::two_pool(std::move(pos), std::move(neg))};
    }
    throw ConfigError("unknown scenario: " + cfg.scenario);
}

void emit_results(const AggregateResult& result, const ExperimentConfig& cfg,
                  const std::string& dir) {
    if (result.policy_names.empty()) {
        throw ConfigError("emit_results: no policies in result");
    }
    namespace fs = std::filesystem;
    std::error_code ec;
    fs::create_directories(dir, ec);

    const fs::path regret_path = fs::path(dir) / "regret.csv";
    {
        std::ofstream out(regret_path);
        if (!out) {
            throw std::runtime_error("cannot write " + regret_path.string());
        }
        out << "step,policy,mean_cum_regret,q05,q95\n";
        for (const auto& name : result.policy_names) {
            const auto& agg = result.per_policy.at(name);
            for (long t = 0; t < result.horizon; ++t) {
                out << (t + 1) << ',' << csv_quote(name) << ','
                    << format_double(agg.mean_cumulative[t]) << ',' << format_double(agg.q05[t])
                    << ',' << format_double(agg.q95[t]) << '\n';
            }
        }
    }

    if (cfg.emit_theta_trace) {
        const fs::path theta_path = fs::path(dir) / "theta_trace.csv";
        std::ofstream out(theta_path);
        if (!out) {
            throw std::runtime_error("cannot write " + theta_path.string());
        }
        Eigen::Index d = 0;
        for (const auto& name : result.policy_names) {
            for (const auto& trace : result.traces.at(name)) {
                if (!trace.theta_snapshots.empty()) {
                    d = trace.theta_snapshots.front().second.size();
                }
            }
        }
        out << "step,policy,replication";
        for (Eigen::Index i = 0; i < d; ++i) {
            out << ",theta_" << i;
        }
        out << '\n';
        for (const auto& name : result.policy_names) {
            const auto& reps = result.traces.at(name);
            for (std::size_t r = 0; r < reps.size(); ++r) {
                for (const auto& [step, theta] : reps[r].theta_snapshots) {
                    out << step << ',' << csv_quote(name) << ',' << r;
                    for (Eigen::Index i = 0; i < theta.size(); ++i) {
                        out << ',' << format_double(theta[i]);
                    }
                    out << '\n';
                }
            }
        }
    }

    const fs::path manifest_path = fs::path(dir) / "manifest.json";
    nlohmann::json manifest;
    manifest["library_version"] = kLibraryVersion;
    manifest["scenario"] = cfg.scenario;
    manifest["replications"] = cfg.replications;
    manifest["base_seed"] = cfg.base_seed;
    manifest["horizon"] = result.horizon;
    manifest["num_actions"] = cfg.num_actions;
    manifest["noise_sigma"] = cfg.noise_sigma;
    manifest["emit_theta_trace"] = cfg.emit_theta_trace;
    manifest["seeds"] = nlohmann::json::array();
    for (int i = 0; i < cfg.replications; ++i) {
        manifest["seeds"].push_back(cfg.base_seed + static_cast<std::uint64_t>(0) + i);
    }
    manifest["policies"] = nlohmann::json::array();
    for (const auto& spec : cfg.policies) {
        nlohmann::json p;
        p["kind"] = spec.kind;
        p["delta"] = spec.config.delta;
        p["sigma"] = spec.config.sigma;
        p["d"] = spec.config.d;
        p["lambda"] = spec.config.lambda;
        p["L"] = spec.config.L;
        p["S"] = spec.config.S;
        if (spec.config.gamma) {
            p["gamma"] = *spec.config.gamma;
        }
        if (spec.config.window) {
            p["window"] = *spec.config.window;
        }
        if (spec.config.horizon) {
            p["horizon"] = *spec.config.horizon;
        }
        p["sw_radius"] = spec.config.sw_radius == SwRadius::corrected ? "corrected" : "legacy";
        if (!spec.restart_breakpoints.empty()) {
            p["breakpoints"] = spec.restart_breakpoints;
        }
        manifest["policies"].push_back(std::move(p));
    }
    std::ofstream out(manifest_path);
    if (!out) {
        throw std::runtime_error("cannot write " + manifest_path.string());
    }
    out << manifest.dump(2) << '\n';
}

}  // namespace nslb
