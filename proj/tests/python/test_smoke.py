import math

import numpy as np
import pytest

import regret_balancing as rb


def test_builtin_scenarios_listed():
    names = rb.list_scenarios()
    assert "fig1_left" in names
    assert "thm5_dichotomy" in names


def test_worked_selection_example():
    j, b = rb.optimistic_base([4, 4], [3.0, 2.0], form="power_law", exponent=0.0, scale=2.0)
    assert j == 0
    assert b == 1.25
    assert rb.empirical_regret(4, 2.0, b) == 3.0
    assert rb.select_base([4, 4], [3.0, 2.0], form="power_law", exponent=0.0, scale=2.0) == 0


def test_bound_and_helpers():
    assert rb.eval_bound("sqrt_half_t_log", 200, delta=0.1) == pytest.approx(15.174, abs=1e-3)
    assert rb.forced_exploration_pulls(1000, 2, 4) == 63
    assert rb.balancing_ratio(1000, 1000**0.6, 1000**0.4) == pytest.approx(0.2)
    assert rb.balancing_ratio(1000, 0.0, 1.0) is None
    assert rb.geometric_grid(1.0, 16.0, 5) == pytest.approx([1, 2, 4, 8, 16])


def test_ridge_state_one_dimensional():
    ridge = rb.RidgeState(1, 1.0)
    ridge.update(np.array([1.0]), 1.0)
    assert ridge.theta_hat[0] == pytest.approx(0.5)
    assert ridge.logdet == pytest.approx(math.log(2.0))
    assert ridge.weighted_norm(np.array([1.0])) == pytest.approx(math.sqrt(0.5))


def test_linear_balancer_selects():
    lrb = rb.LinearRegretBalancer(2)
    actions = [np.array([1.0, 0.0]), np.array([0.0, 1.0])]
    sel = lrb.select(actions)
    assert sel["chosen"] in (0, 1)
    assert sel["b_t"] >= 0.0
    lrb.update(actions[sel["chosen"]], 0.3)
    assert lrb.ridge.count == 1


def test_run_is_deterministic():
    a = rb.run("fig1_left", seeds=3, horizon=500, threads=1)
    b = rb.run("fig1_left", seeds=3, horizon=500, threads=2)
    assert a["summary_csv"] == b["summary_csv"]
    assert a["algorithms"] == ["regret_balancing", "ucb1"]
    assert len(a["regret"]["ucb1"]) == 3
    assert len(a["regret"]["ucb1"][0]) == len(a["checkpoints"])


def test_run_to_dir(tmp_path):
    files = rb.run_to_dir("thm5_dichotomy", str(tmp_path), seeds=2, horizon=1000)
    header = open(files["summary"]).readline().strip()
    assert header == "scenario,seed,checkpoint_t,algorithm,cumulative_regret"
    assert files["reference"] is not None


def test_config_errors_name_the_field():
    with pytest.raises(rb.ConfigError, match=r"runs\[0\]\.bases\[0\]\.c"):
        rb.show_scenario("fig1_left", overrides=['runs.0.bases.0={"kind": "eps_greedy", "c": -1}'])
