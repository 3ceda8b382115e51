#include <pybind11/eigen.h>
#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nslb/verify.hpp"

namespace py = pybind11;
using namespace nslb;

namespace {

PolicyConfig make_config(double delta, double sigma, Eigen::Index d, double lambda, double L,
                         double S, py::object gamma, py::object window, py::object horizon,
                         const std::string& sw_radius) {
    PolicyConfig cfg;
    cfg.delta = delta;
    cfg.sigma = sigma;
    cfg.d = d;
    cfg.lambda = lambda;
    cfg.L = L;
    cfg.S = S;
    if (!gamma.is_none()) {
        cfg.gamma = gamma.cast<double>();
    }
    if (!window.is_none()) {
        cfg.window = window.cast<long>();
    }
    if (!horizon.is_none()) {
        cfg.horizon = horizon.cast<long>();
    }
    if (sw_radius == "legacy") {
        cfg.sw_radius = SwRadius::legacy;
    } else if (sw_radius != "corrected") {
        throw InvalidConfig("sw_radius must be 'corrected' or 'legacy'");
    }
    return cfg;
}

py::dict run_experiment(const std::string& scenario, const std::vector<std::string>& policies,
                        int replications, std::uint64_t seed, long horizon, int num_actions,
                        double noise_sigma, py::object gamma, py::object window) {
    ExperimentConfig cfg;
    cfg.scenario = scenario;
    cfg.replications = replications;
    cfg.base_seed = seed;
    cfg.horizon = horizon;
    cfg.num_actions = num_actions;
    cfg.noise_sigma = noise_sigma;

    auto [traj, sampler] = build_scenario(cfg);
    const long T = cfg.horizon > 0 ? cfg.horizon : traj.horizon;
    const double budget = variation_budget(traj);

    for (const auto& kind : policies) {
        PolicySpec spec;
        spec.kind = kind;
        spec.config.d = traj.dim;
        spec.config.sigma = noise_sigma;
        spec.config.L = std::max(sampler.norm_bound(), 1e-12);
        spec.config.S = std::max(traj.norm_bound, 1e-12);
        spec.config.horizon = T;
        if (kind == "dlinucb") {
            spec.config.gamma =
                gamma.is_none() ? tune_gamma(budget, traj.dim, T) : gamma.cast<double>();
        } else if (kind == "swlinucb") {
            spec.config.window =
                window.is_none() ? tune_window(budget, traj.dim, T) : window.cast<long>();
        } else if (kind == "linucb") {
            spec.config.gamma = 1.0;
        } else if (kind == "linucb-or") {
            spec.config.gamma = 1.0;
            spec.restart_breakpoints = traj.breakpoints;
        } else {
            throw ConfigError("unknown policy kind: " + kind);
        }
        cfg.policies.push_back(std::move(spec));
    }
    cfg.validate();
    const AggregateResult result = run_replications(cfg, traj, sampler);

    py::dict out;
    out["horizon"] = result.horizon;
    out["replications"] = result.replications;
    out["variation_budget"] = budget;
    py::dict per_policy;
    for (const auto& name : result.policy_names) {
        const auto& agg = result.per_policy.at(name);
        py::dict p;
        p["mean_cumulative"] = agg.mean_cumulative;
        p["q05"] = agg.q05;
        p["q95"] = agg.q95;
        p["final_mean"] = agg.final_mean;
        per_policy[py::str(name)] = p;
    }
    out["policies"] = per_policy;
    return out;
}

}  // namespace

PYBIND11_MODULE(nslb, m) {
    m.doc() = "Non-stationary stochastic linear bandits: discounted and "
              "sliding-window optimistic policies, scenarios, and diagnostics";

    py::register_exception<InvalidConfig>(m, "InvalidConfig", PyExc_ValueError);
    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<DimensionMismatch>(m, "DimensionMismatch", PyExc_ValueError);

    py::class_<PolicyConfig>(m, "PolicyConfig")
        .def(py::init(&make_config), py::arg("delta") = 0.05, py::arg("sigma") = 1.0,
             py::arg("d") = 2, py::arg("lam") = 1.0, py::arg("L") = 1.0, py::arg("S") = 1.0,
             py::arg("gamma") = py::none(), py::arg("window") = py::none(),
             py::arg("horizon") = py::none(), py::arg("sw_radius") = "corrected")
        .def_readwrite("delta", &PolicyConfig::delta)
        .def_readwrite("sigma", &PolicyConfig::sigma)
        .def_readwrite("d", &PolicyConfig::d)
        .def_readwrite("lam", &PolicyConfig::lambda)
        .def_readwrite("L", &PolicyConfig::L)
        .def_readwrite("S", &PolicyConfig::S)
        .def("validate", &PolicyConfig::validate);

    py::class_<ArmDecision>(m, "ArmDecision")
        .def_readonly("chosen_index", &ArmDecision::chosen_index)
        .def_readonly("ucb_values", &ArmDecision::ucb_values)
        .def_readonly("beta", &ArmDecision::beta)
        .def_readonly("exploration_bonus", &ArmDecision::exploration_bonus);

    py::class_<DLinUcbPolicy>(m, "DLinUcb")
        .def(py::init<PolicyConfig, std::string>(), py::arg("config"),
             py::arg("name") = "dlinucb")
        .def("select", &DLinUcbPolicy::select, py::arg("actions"))
        .def("update", &DLinUcbPolicy::update, py::arg("action"), py::arg("reward"))
        .def("reset", &DLinUcbPolicy::reset)
        .def("theta_hat", &DLinUcbPolicy::theta_hat);

    py::class_<SwLinUcbPolicy>(m, "SwLinUcb")
        .def(py::init<PolicyConfig>(), py::arg("config"))
        .def("select", &SwLinUcbPolicy::select, py::arg("actions"))
        .def("update", &SwLinUcbPolicy::update, py::arg("action"), py::arg("reward"))
        .def("reset", &SwLinUcbPolicy::reset)
        .def("theta_hat", &SwLinUcbPolicy::theta_hat);

    m.def("beta_dlinucb", &beta_dlinucb, py::arg("t"), py::arg("config"));
    m.def("beta_swlinucb", &beta_swlinucb, py::arg("t"), py::arg("config"));
    m.def("tune_gamma", &tune_gamma, py::arg("variation_budget"), py::arg("d"),
          py::arg("horizon"));
    m.def("tune_window", &tune_window, py::arg("variation_budget"), py::arg("d"),
          py::arg("horizon"));
    m.def("tune_window_unknown", &tune_window_unknown, py::arg("d"), py::arg("horizon"));

    m.def(
        "variation_budget",
        [](const std::string& scenario) {
            if (scenario == "abrupt") return variation_budget(abrupt_scenario());
            if (scenario == "slow") return variation_budget(slowly_varying_scenario());
            throw ConfigError("unknown scenario: " + scenario);
        },
        py::arg("scenario"));

    m.def(
        "theta_star",
        [](const std::string& scenario, long t) {
            if (scenario == "abrupt") return abrupt_scenario().value(t);
            if (scenario == "slow") return slowly_varying_scenario().value(t);
            throw ConfigError("unknown scenario: " + scenario);
        },
        py::arg("scenario"), py::arg("t"),
        "True parameter of a built-in 2-d scenario at step t");

    m.def("run_experiment", &run_experiment, py::arg("scenario"),
          py::arg("policies") = std::vector<std::string>{"dlinucb", "swlinucb", "linucb",
                                                         "linucb-or"},
          py::arg("replications") = 5, py::arg("seed") = 0, py::arg("horizon") = 0,
          py::arg("num_actions") = 10, py::arg("noise_sigma") = 1.0,
          py::arg("gamma") = py::none(), py::arg("window") = py::none(),
          "Run seeded replications of a built-in scenario and return the "
          "aggregated regret curves");

    m.def(
        "coverage_test",
        [](Eigen::Index d, long horizon, double gamma, double lambda, double delta, double sigma,
           int runs, std::uint64_t seed) {
            CoverageConfig cfg;
            cfg.d = d;
            cfg.horizon = horizon;
            cfg.gamma = gamma;
            cfg.lambda = lambda;
            cfg.delta = delta;
            cfg.sigma = sigma;
            cfg.runs = runs;
            cfg.seed = seed;
            const CoverageReport rep = coverage_test(cfg);
            py::dict out;
            out["runs"] = rep.runs;
            out["failures"] = rep.failures;
            out["failure_rate"] = rep.empirical_failure_rate;
            out["delta"] = rep.delta;
            out["worst_margin"] = rep.worst_margin;
            out["threshold"] = rep.acceptance_threshold();
            return out;
        },
        py::arg("d") = 2, py::arg("horizon") = 300, py::arg("gamma") = 0.95,
        py::arg("lam") = 1.0, py::arg("delta") = 0.05, py::arg("sigma") = 1.0,
        py::arg("runs") = 1000, py::arg("seed") = 0,
        "Monte Carlo check of the deviation bound; returns the empirical "
        "failure rate and its acceptance threshold");
}
