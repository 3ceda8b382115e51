#ifndef NSLB_HARNESS_HPP
#define NSLB_HARNESS_HPP

#include <cstdint>
#include <map>
#include <string>

#include "nslb/environments.hpp"
#include "nslb/policies.hpp"

namespace nslb {

/// Named policy specification resolved into a Policy instance per
/// replication. `kind` is one of dlinucb, swlinucb, linucb, linucb-or.
struct PolicySpec {
    std::string kind;
    PolicyConfig config;
    std::vector<long> restart_breakpoints;  // linucb-or only

    std::unique_ptr<Policy> instantiate() const;
};

/// Full experiment description; the JSON config file and the CLI flags
/// both map onto this.
struct ExperimentConfig {
    std::string scenario = "abrupt";
    std::vector<PolicySpec> policies;
    int replications = 1;
    std::uint64_t base_seed = 0;
    long horizon = 0;  // 0: use the scenario's own horizon
    std::string output_dir;
    bool emit_theta_trace = false;
    long theta_stride = 100;
    int num_actions = 10;   // K for the unit-sphere sampler
    double noise_sigma = 1.0;

    void validate() const;
};

/// Per-step dynamic-regret record of one seeded replication.
struct RegretTrace {
    std::vector<double> instantaneous;      // r_t
    std::vector<double> cumulative;         // R_t = sum_{s<=t} r_s
    std::vector<std::size_t> chosen_index;  // arm picked at each step
    std::vector<std::pair<long, Vector>> theta_snapshots;  // (step, theta_hat)
};

/// Cross-replication aggregate for one policy.
struct PolicyAggregate {
    std::vector<double> mean_cumulative;
    std::vector<double> q05;
    std::vector<double> q95;
    double final_mean = 0.0;
};

struct AggregateResult {
    long horizon = 0;
    int replications = 0;
    // Keyed by policy name; insertion order preserved separately for output.
    std::vector<std::string> policy_names;
    std::map<std::string, PolicyAggregate> per_policy;
    std::map<std::string, std::vector<RegretTrace>> traces;  // kept when theta traces are on
};

/// Deterministic substream seeding: one stream per (replication, role).
Rng make_stream(std::uint64_t base_seed, std::uint64_t replication, std::uint64_t role);

/// Runs one full episode: T rounds of receive-set / select / observe /
/// update. Regret is computed against the mean-reward oracle, never
/// against realized noise. Deterministic given the seed.
RegretTrace run_episode(Policy& policy, const ThetaTrajectory& traj,
                        const ActionSetSampler& sampler, const NoiseModel& noise,
                        std::uint64_t base_seed, std::uint64_t replication, long horizon,
                        long theta_stride = 0);

/// Runs all configured policies for N seeded replications (possibly in
/// parallel; the aggregate is independent of execution order) and
/// aggregates mean and 5%/95% nearest-rank quantile bands.
AggregateResult run_replications(const ExperimentConfig& cfg, const ThetaTrajectory& traj,
                                 const ActionSetSampler& sampler);

/// Resolves the built-in scenario + sampler pair named by the config.
std::pair<ThetaTrajectory, ActionSetSampler> build_scenario(const ExperimentConfig& cfg);

/// Writes regret.csv, optionally theta_trace.csv, and manifest.json into
/// dir.
void emit_results(const AggregateResult& result, const ExperimentConfig& cfg,
                  const std::string& dir);

/// Parallel replication cap: NONSTAT_THREADS, defaulting to the hardware
/// concurrency.
unsigned harness_thread_cap();

}  // namespace nslb

#endif
