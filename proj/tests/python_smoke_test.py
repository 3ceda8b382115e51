"""Smoke tests for the python bindings."""

import math

import numpy as np
import pytest

import nslb


def test_tuning():
    g = nslb.tune_gamma(1.57, 2, 6000)
    assert 0.99741 <= g <= 0.99743
    assert nslb.tune_window(1.57, 2, 6000) in (387, 388, 389)
    assert nslb.tune_window_unknown(1, 1000) == 100


def test_beta_radii():
    cfg = nslb.PolicyConfig(gamma=0.95)
    assert nslb.beta_dlinucb(0, cfg) == pytest.approx(1.0 + math.sqrt(2.0 * math.log(20.0)))
    sw = nslb.PolicyConfig(window=4, horizon=1000)
    assert nslb.beta_swlinucb(0, sw) == pytest.approx(1.0 + math.sqrt(2.0 * math.log(20000.0)))


def test_policy_roundtrip():
    cfg = nslb.PolicyConfig(d=2, gamma=0.9)
    policy = nslb.DLinUcb(cfg)
    actions = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    decision = policy.select(actions)
    assert decision.chosen_index == 0  # fresh state ties break to the lowest index
    policy.update(actions[0], 1.0)
    theta = policy.theta_hat()
    assert theta[0] == pytest.approx(0.5)
    assert theta[1] == pytest.approx(0.0)
    policy.reset()
    assert np.allclose(policy.theta_hat(), 0.0)


def test_sliding_window_policy():
    cfg = nslb.PolicyConfig(d=2, window=5, horizon=100)
    policy = nslb.SwLinUcb(cfg)
    actions = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    for _ in range(10):
        d = policy.select(actions)
        policy.update(actions[d.chosen_index], 1.0)
    assert np.isfinite(policy.theta_hat()).all()


def test_invalid_config_raises():
    with pytest.raises(ValueError):
        nslb.PolicyConfig(gamma=0.9, window=5).validate()


def test_scenarios():
    assert nslb.variation_budget("abrupt") == pytest.approx(4.0 + math.sqrt(2.0))
    theta = nslb.theta_star("abrupt", 500)
    assert theta[0] == pytest.approx(1.0)
    with pytest.raises(ValueError):
        nslb.variation_budget("nope")


def test_run_experiment_deterministic():
    kwargs = dict(scenario="abrupt", policies=["dlinucb", "linucb"],
                  replications=2, seed=3, horizon=50)
    a = nslb.run_experiment(**kwargs)
    b = nslb.run_experiment(**kwargs)
    assert a["policies"]["dlinucb"]["mean_cumulative"] == \
        b["policies"]["dlinucb"]["mean_cumulative"]
    assert a["horizon"] == 50
    assert a["policies"]["linucb"]["final_mean"] >= 0.0


def test_coverage_smoke():
    rep = nslb.coverage_test(runs=50, horizon=100, seed=1)
    assert rep["runs"] == 50
    assert 0.0 <= rep["failure_rate"] <= 1.0
