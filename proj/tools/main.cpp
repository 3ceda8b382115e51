#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "nslb/verify.hpp"

namespace {

using nlohmann::json;

struct RunOptions {
    std::string config_path;
    std::string scenario;
    std::string policies;
    int reps = -1;
    std::int64_t seed = -1;
    long horizon = -1;
    double gamma = -1.0;
    long window = -1;
    std::string out_dir;
    std::string sw_radius;
    double delta = -1.0;
    double lambda = -1.0;
    double noise_sigma = -1.0;
    int num_actions = -1;
    bool emit_theta = false;
};

std::vector<std::string> split_csv(const std::string& s) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) {
            parts.push_back(item);
        }
    }
    return parts;
}

// Builds the effective experiment config: config-file values first, then
// command-line flags on top.
nslb::ExperimentConfig build_run_config(const RunOptions& opt, std::vector<std::string>& policy_kinds,
                                        std::map<std::string, json>& policy_overrides) {
    nslb::ExperimentConfig cfg;
    cfg.scenario = "abrupt";
    cfg.replications = 20;
    cfg.base_seed = 0;
    cfg.output_dir = "results";

    if (!opt.config_path.empty()) {
        std::ifstream in(opt.config_path);
        if (!in) {
            throw nslb::ConfigError("cannot open config file: " + opt.config_path);
        }
        json doc;
        try {
            doc = json::parse(in);
        } catch (const json::parse_error& e) {
            throw nslb::ConfigError("malformed config " + opt.config_path + ": " + e.what());
        }
        if (doc.contains("scenario")) cfg.scenario = doc["scenario"].get<std::string>();
        if (doc.contains("replications")) cfg.replications = doc["replications"].get<int>();
        if (doc.contains("seed")) cfg.base_seed = doc["seed"].get<std::uint64_t>();
        if (doc.contains("horizon")) cfg.horizon = doc["horizon"].get<long>();
        if (doc.contains("output")) cfg.output_dir = doc["output"].get<std::string>();
        if (doc.contains("options")) {
            const auto& o = doc["options"];
            if (o.contains("num_actions")) cfg.num_actions = o["num_actions"].get<int>();
            if (o.contains("noise_sigma")) cfg.noise_sigma = o["noise_sigma"].get<double>();
            if (o.contains("emit_theta_trace")) cfg.emit_theta_trace = o["emit_theta_trace"].get<bool>();
            if (o.contains("theta_stride")) cfg.theta_stride = o["theta_stride"].get<long>();
        }
        if (doc.contains("policies")) {
            for (const auto& p : doc["policies"]) {
                if (p.is_string()) {
                    policy_kinds.push_back(p.get<std::string>());
                } else {
                    const auto kind = p.at("kind").get<std::string>();
                    policy_kinds.push_back(kind);
                    policy_overrides[kind] = p;
                }
            }
        }
    }

    if (!opt.scenario.empty()) cfg.scenario = opt.scenario;
    if (opt.reps >= 0) cfg.replications = opt.reps;
    if (opt.seed >= 0) cfg.base_seed = static_cast<std::uint64_t>(opt.seed);
    if (opt.horizon >= 0) cfg.horizon = opt.horizon;
    if (!opt.out_dir.empty()) cfg.output_dir = opt.out_dir;
    if (opt.noise_sigma >= 0.0) cfg.noise_sigma = opt.noise_sigma;
    if (opt.num_actions >= 0) cfg.num_actions = opt.num_actions;
    if (opt.emit_theta) cfg.emit_theta_trace = true;
    if (!opt.policies.empty()) {
        policy_kinds = split_csv(opt.policies);
    }
    if (policy_kinds.empty()) {
        policy_kinds = {"dlinucb", "swlinucb", "linucb", "linucb-or"};
    }
    return cfg;
}

int cmd_run(const RunOptions& opt) {
    std::vector<std::string> policy_kinds;
    std::map<std::string, json> policy_overrides;
    nslb::ExperimentConfig cfg = build_run_config(opt, policy_kinds, policy_overrides);

    auto [traj, sampler] = nslb::build_scenario(cfg);
    const long T = cfg.horizon > 0 ? cfg.horizon : traj.horizon;
    const double budget = nslb::variation_budget(traj);

    nslb::PolicyConfig base;
    base.d = traj.dim;
    base.L = std::max(sampler.norm_bound(), 1e-12);
    base.S = std::max(traj.norm_bound, 1e-12);
    base.sigma = cfg.noise_sigma;
    base.horizon = T;
    if (opt.delta > 0.0) base.delta = opt.delta;
    if (opt.lambda > 0.0) base.lambda = opt.lambda;
    if (opt.sw_radius == "legacy") {
        base.sw_radius = nslb::SwRadius::legacy;
    } else if (!opt.sw_radius.empty() && opt.sw_radius != "corrected") {
        throw nslb::ConfigError("--sw-radius must be 'corrected' or 'legacy'");
    }

    for (const auto& kind : policy_kinds) {
        nslb::PolicySpec spec;
        spec.kind = kind;
        spec.config = base;
        json over = policy_overrides.count(kind) ? policy_overrides[kind] : json::object();
        if (over.contains("delta")) spec.config.delta = over["delta"].get<double>();
        if (over.contains("lambda")) spec.config.lambda = over["lambda"].get<double>();
        if (over.contains("sw_radius")) {
            spec.config.sw_radius = over["sw_radius"].get<std::string>() == "legacy"
                                        ? nslb::SwRadius::legacy
                                        : nslb::SwRadius::corrected;
        }
        if (kind == "dlinucb") {
            spec.config.gamma = opt.gamma > 0.0 ? opt.gamma
                                : over.contains("gamma") ? over["gamma"].get<double>()
                                                         : nslb::tune_gamma(budget, traj.dim, T);
        } else if (kind == "swlinucb") {
            spec.config.window = opt.window > 0 ? opt.window
                                 : over.contains("window")
                                     ? over["window"].get<long>()
                                     : nslb::tune_window(budget, traj.dim, T);
        } else if (kind == "linucb") {
            spec.config.gamma = 1.0;
        } else if (kind == "linucb-or") {
            spec.config.gamma = 1.0;
            spec.restart_breakpoints = traj.breakpoints;
        } else {
            throw nslb::ConfigError("unknown policy kind: " + kind);
        }
        cfg.policies.push_back(std::move(spec));
    }

    cfg.validate();
    const nslb::AggregateResult result = nslb::run_replications(cfg, traj, sampler);
    nslb::emit_results(result, cfg, cfg.output_dir);

    std::cout << "scenario=" << cfg.scenario << " T=" << T << " N=" << cfg.replications
              << " B_T=" << budget << '\n';
    for (const auto& name : result.policy_names) {
        std::cout << "  " << name
                  << ": mean final regret = " << result.per_policy.at(name).final_mean << '\n';
    }
    std::cout << "results written to " << cfg.output_dir << '\n';
    return 0;
}

int cmd_tune(double budget, long d, long horizon) {
    if (d < 1 || horizon < 1) {
        throw nslb::ConfigError("tune: d and T must be positive");
    }
    const double gamma = nslb::tune_gamma(budget, d, horizon);
    const long window = nslb::tune_window(budget, d, horizon);
    const long window_unknown = nslb::tune_window_unknown(d, horizon);
    std::cout << "gamma = " << std::setprecision(10) << gamma;
    if (budget <= 0.0) {
        std::cout << "  (budget <= 0: clamped to 1 - 1e-6)";
    }
    std::cout << '\n';
    std::cout << "window (known B_T) = " << window;
    if (budget <= 0.0) {
        std::cout << "  (budget <= 0: clamped to T)";
    }
    std::cout << '\n';
    std::cout << "window (unknown B_T) = " << window_unknown << '\n';
    return 0;
}

int cmd_verify(const std::string& suite, std::uint64_t seed, const std::string& report_path) {
    if (suite != "coverage" && suite != "matrix" && suite != "sw" && suite != "bias" &&
        suite != "all") {
        throw nslb::ConfigError("unknown verify suite: " + suite);
    }
    json report;
    report["seed"] = seed;
    bool ok = true;

    if (suite == "coverage" || suite == "all") {
        nslb::CoverageConfig ccfg;
        ccfg.seed = seed;
        const nslb::CoverageReport cov = nslb::coverage_test(ccfg);
        const bool pass = cov.empirical_failure_rate <= cov.acceptance_threshold();
        ok = ok && pass;
        report["coverage"] = {{"runs", cov.runs},
                              {"failures", cov.failures},
                              {"failure_rate", cov.empirical_failure_rate},
                              {"delta", cov.delta},
                              {"threshold", cov.acceptance_threshold()},
                              {"worst_margin", cov.worst_margin},
                              {"pass", pass}};
    }

    const nslb::ThetaTrajectory traj = nslb::abrupt_scenario();
    const nslb::ActionSetSampler sampler = nslb::ActionSetSampler::unit_sphere(traj.dim, 10);

    if (suite == "matrix" || suite == "all") {
        nslb::PolicyConfig pcfg;
        pcfg.gamma = 0.95;
        const auto trace = nslb::record_dlinucb_run(traj, pcfg, sampler, 1.0, seed, 500);
        const auto rep = nslb::assert_matrix_inequalities(trace);
        ok = ok && rep.passed;
        report["matrix"] = {{"pass", rep.passed},
                            {"first_violation_step", rep.first_violation_step},
                            {"violated", rep.violated},
                            {"min_margin", rep.min_margin}};
    }
    if (suite == "sw" || suite == "all") {
        nslb::PolicyConfig pcfg;
        pcfg.window = 50;
        pcfg.horizon = 500;
        const auto trace = nslb::record_sw_run(traj, pcfg, sampler, 1.0, seed, 500);
        const auto rep = nslb::assert_sw_inequalities(trace);
        ok = ok && rep.passed;
        report["sw"] = {{"pass", rep.passed},
                        {"first_violation_step", rep.first_violation_step},
                        {"min_margin", rep.min_margin}};
    }
    if (suite == "bias" || suite == "all") {
        nslb::PolicyConfig pcfg;
        pcfg.gamma = 0.997;
        const auto trace = nslb::record_dlinucb_run(traj, pcfg, sampler, 1.0, seed, 500);
        const long D = static_cast<long>(std::ceil(std::log(500.0) / (1.0 - 0.997)));
        const auto rep = nslb::bias_diagnostic(trace, std::min<long>(D, 499), 1.0);
        ok = ok && rep.passed;
        report["bias"] = {{"pass", rep.passed},
                          {"first_violation_step", rep.first_violation_step},
                          {"max_bias", rep.max_bias},
                          {"min_margin", rep.min_margin}};
    }

    report["pass"] = ok;
    if (report_path.empty()) {
        std::cout << report.dump(2) << '\n';
    } else {
        std::ofstream out(report_path);
        if (!out) {
            throw std::runtime_error("cannot write report to " + report_path);
        }
        out << report.dump(2) << '\n';
    }
    return ok ? 0 : 1;
}

int cmd_scenarios() {
    std::cout << "abrupt        d=2, T=6000, breakpoints at 1000/2000/3000, B_T ~ 5.41\n"
              << "slow          d=2, T=6000, quarter-circle drift over 3000 steps, B_T ~ 1.57\n"
              << "highdim-flip  d=50, T=8000, 60% coordinate sign flip at t=4000, two-pool contexts\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Non-stationary linear bandit simulator"};
    app.require_subcommand(1);

    RunOptions run_opt;
    auto* run = app.add_subcommand("run", "Run a regret experiment and emit CSV results");
    run->add_option("--config", run_opt.config_path, "JSON experiment config");
    run->add_option("--scenario", run_opt.scenario, "abrupt | slow | highdim-flip");
    run->add_option("--policies", run_opt.policies,
                    "comma list of dlinucb,swlinucb,linucb,linucb-or");
    run->add_option("--reps", run_opt.reps, "number of replications");
    run->add_option("--seed", run_opt.seed, "base seed");
    run->add_option("--horizon", run_opt.horizon, "override horizon T");
    run->add_option("--gamma", run_opt.gamma, "discount factor for dlinucb");
    run->add_option("--window", run_opt.window, "window length for swlinucb");
    run->add_option("--out", run_opt.out_dir, "output directory");
    run->add_option("--sw-radius", run_opt.sw_radius, "corrected | legacy");
    run->add_option("--delta", run_opt.delta, "confidence level");
    run->add_option("--lambda", run_opt.lambda, "regularization");
    run->add_option("--noise-sigma", run_opt.noise_sigma, "noise standard deviation");
    run->add_option("--num-actions", run_opt.num_actions, "actions per round (synthetic)");
    run->add_flag("--emit-theta", run_opt.emit_theta, "emit theta_trace.csv");

    double tune_budget = 0.0;
    long tune_d = 0, tune_T = 0;
    auto* tune = app.add_subcommand("tune", "Print tuned discount factor and window length");
    tune->add_option("budget", tune_budget, "variation budget B_T")->required();
    tune->add_option("d", tune_d, "dimension")->required();
    tune->add_option("T", tune_T, "horizon")->required();

    std::string verify_suite = "all";
    std::uint64_t verify_seed = 1;
    std::string verify_out;
    auto* verify = app.add_subcommand("verify", "Run the empirical inequality checks");
    verify->add_option("suite", verify_suite, "coverage | matrix | sw | bias | all");
    verify->add_option("--seed", verify_seed, "seed");
    verify->add_option("--out", verify_out, "write the JSON report to this file");

    auto* scenarios = app.add_subcommand("scenarios", "List built-in scenarios");

    try {
        app.parse(argc, argv);
        if (run->parsed()) {
            return cmd_run(run_opt);
        }
        if (tune->parsed()) {
            return cmd_tune(tune_budget, tune_d, tune_T);
        }
        if (verify->parsed()) {
            return cmd_verify(verify_suite, verify_seed, verify_out);
        }
        if (scenarios->parsed()) {
            return cmd_scenarios();
        }
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    } catch (const nslb::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const nslb::InvalidConfig& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 2;
}
