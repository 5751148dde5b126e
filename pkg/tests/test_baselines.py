import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from semiactive import baselines as bl
from semiactive.damper import V_MAX
from semiactive.sim import SimConfig, simulate


def run_pid(gains, qs, period=0.01):
    state = bl.PidState(period)
    out = []
    for q in qs:
        v, state = bl.pid_step(gains, state, q)
        out.append(v)
    return out, state


def test_uncontrolled_policy_is_zero():
    assert bl.uncontrolled_policy() == 0.0
    assert bl.uncontrolled_policy(np.ones(3), 1.2) == 0.0


def test_pid_zero_measurement():
    vs, state = run_pid(bl.PidGains(3, 4, 5), [0.0] * 5)
    assert vs == [0.0] * 5
    assert state.integral == 0.0 and state.prev_q == 0.0


def test_pid_proportional_examples():
    assert bl.pid_step(bl.PidGains(kp=1), bl.PidState(0.01), -0.5)[0] == 0.5
    assert bl.pid_step(bl.PidGains(kp=1), bl.PidState(0.01), -10.0)[0] == 3.0
    assert bl.pid_step(bl.PidGains(kp=1), bl.PidState(0.01), 2.0)[0] == 0.0


def test_pid_integral_and_derivative_by_hand():
    g = bl.PidGains(kp=0.0, ki=10.0, kd=0.0)
    vs, state = run_pid(g, [-1.0, -1.0])
    assert vs == pytest.approx([0.1, 0.2], abs=1e-15)
    assert state.integral == pytest.approx(0.02)
    # derivative on measurement: falling q pushes the output up
    v, _ = bl.pid_step(bl.PidGains(kd=0.1), bl.PidState(0.01, prev_q=1.0), 0.9)
    assert v == pytest.approx(0.1 * 0.1 / 0.01)


def test_pid_anti_windup():
    g = bl.PidGains(kp=1.0, ki=50.0)
    vs, state = run_pid(g, [-10.0] * 200)
    assert all(v == 3.0 for v in vs)
    assert abs(g.ki * state.integral) <= V_MAX
    # the wound-up integral cannot hold the output high once the error flips
    v, _ = bl.pid_step(g, state, 1.0)
    assert v < 3.0


@settings(max_examples=200, deadline=None)
@given(st.tuples(*[st.floats(0, 1000)] * 3), st.lists(st.floats(-1e3, 1e3), min_size=1, max_size=30))
def test_pid_output_range(gains, qs):
    g = bl.PidGains(*gains)
    vs, state = run_pid(g, qs)
    assert all(0.0 <= v <= 3.0 for v in vs)
    if g.ki > 0:
        assert abs(g.ki * state.integral) <= V_MAX * (1 + 1e-12)


@pytest.mark.parametrize("bad", [(-1, 0, 0), (0, math.nan, 0), (0, 0, math.inf)])
def test_pid_gains_validation(bad):
    with pytest.raises(ValueError):
        bl.PidGains(*bad)


def test_pid_rejects_bad_inputs():
    with pytest.raises(ValueError):
        bl.PidState(0.0)
    with pytest.raises(ValueError):
        bl.pid_step(bl.PidGains(1), bl.PidState(0.01), math.nan)


def sphere(x):
    return float(np.sum(x * x))


def test_pso_sphere():
    res = bl.pso_tune(sphere, bl.PsoConfig(lower=(-5, -5), upper=(5, 5)))
    assert res.best_cost < 1e-3
    assert res.evaluations == 30 * 60 and len(res.trace) == 60


def test_pso_quadratic_matches_grid():
    cfg = bl.PsoConfig(lower=(0.0,), upper=(10.0,))
    res = bl.pso_tune(lambda x: (x[0] - 2.0) ** 2, cfg)
    grid = np.linspace(0, 10, 10_000)
    oracle = grid[np.argmin((grid - 2.0) ** 2)]
    assert abs(res.best_position[0] - oracle) < 0.01


def test_pso_budget_one_is_initial_swarm_best():
    cfg = bl.PsoConfig(swarm_size=7, iterations=1, lower=(-5, -5), upper=(5, 5), seed=3)
    seen = []
    res = bl.pso_tune(lambda x: seen.append(x) or sphere(x), cfg)
    costs = [sphere(x) for x in seen]
    assert len(seen) == 7 and res.trace == [min(costs)]
    np.testing.assert_array_equal(res.best_position, seen[int(np.argmin(costs))])


def test_pso_trace_monotone_and_bounds_respected():
    lo, hi = (-1.0, 2.0, 0.0), (1.0, 3.0, 0.5)
    seen = []

    def rastrigin(x):
        seen.append(x.copy())
        return float(10 * x.size + np.sum(x * x - 10 * np.cos(2 * np.pi * x)))

    res = bl.pso_tune(rastrigin, bl.PsoConfig(lower=lo, upper=hi, seed=4))
    assert all(b <= a for a, b in zip(res.trace, res.trace[1:]))
    pts = np.array(seen)
    assert np.all(pts >= lo) and np.all(pts <= hi)


def test_pso_reproducible():
    cfg = bl.PsoConfig(swarm_size=10, iterations=15, lower=(-3, -3), upper=(3, 3), seed=9)
    a, b = bl.pso_tune(sphere, cfg), bl.pso_tune(sphere, cfg)
    assert a.best_position.tobytes() == b.best_position.tobytes()
    assert a.trace == b.trace


def test_pso_non_finite_handling():
    cfg = bl.PsoConfig(swarm_size=4, iterations=3, lower=(-1,), upper=(1,))
    with pytest.raises(RuntimeError):
        bl.pso_tune(lambda x: math.nan, cfg)
    res = bl.pso_tune(lambda x: math.inf if x[0] < 0 else x[0], cfg)
    assert math.isfinite(res.best_cost) and res.best_position[0] >= 0


@pytest.mark.parametrize("kw", [{"swarm_size": 1}, {"iterations": 0}, {"lower": (0, 0), "upper": (1,)},
                                {"lower": (1,), "upper": (1,)}])
def test_pso_config_validation(kw):
    with pytest.raises(ValueError):
        bl.PsoConfig(**kw)


SHORT = SimConfig(horizon=1.5, mode="pid")


@pytest.mark.slow
def test_kp_only_tuning_matches_sweep():
    # the landscape is almost flat for large kp, so a lower cost counts as a match too
    pso = bl.PsoConfig(swarm_size=8, iterations=10, lower=(0.0,), upper=(100.0,), seed=1)
    gains, _, res = bl.tune_pid_on_bump(SHORT, pso, free=("kp",))
    assert gains.ki == 0.0 and gains.kd == 0.0
    cost = bl.pid_objective(SHORT, ("kp",))
    grid = np.linspace(0.0, 100.0, 200)
    sweep = np.array([cost([k]) for k in grid])
    best = int(np.argmin(sweep))
    assert abs(gains.kp - grid[best]) <= grid[1] - grid[0] or res.best_cost <= sweep[best]


def test_tuned_pid_beats_uncontrolled_and_is_consistent():
    pso = bl.PsoConfig(swarm_size=5, iterations=3, seed=2)
    gains, report, res = bl.tune_pid_on_bump(SHORT, pso)
    _, base = simulate(replace(SHORT, mode="uncontrolled"))
    assert report.rms_ba < base.rms_ba
    assert report.name == "pso-pid"
    assert bl.pid_objective(SHORT)([gains.kp, gains.ki, gains.kd]) == res.best_cost
    assert report.rms_ba == res.best_cost
    doc = bl.gains_document(gains, report, res, pso)
    assert doc["seed"] == 2 and doc["gains"] == {"kp": gains.kp, "ki": gains.ki, "kd": gains.kd}


def test_tune_rejects_bound_mismatch():
    with pytest.raises(ValueError):
        bl.tune_pid_on_bump(SHORT, bl.PsoConfig(), free=("kp",))
