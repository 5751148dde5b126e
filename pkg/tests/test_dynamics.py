import dataclasses

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm

from semiactive.damper import DamperState
from semiactive.dynamics import (VehicleState, body_acceleration, mechanical_energy, rk4_step,
                                 vehicle_derivatives)
from semiactive.params import SuspensionParams
from semiactive.road import BumpProfile, ZeroRoad
from semiactive.sim import SimConfig, simulate


def state_space(p):
    """Textbook (A, B, D) matrices of the quarter car, built independently of the code under test."""
    A = np.array([
        [0, 0, 1, 0],
        [0, 0, 0, 1],
        [-p.k_s / p.m_b, p.k_s / p.m_b, 0, 0],
        [p.k_s / p.m_w, -(p.k_s + p.k_t) / p.m_w, 0, 0],
    ])
    B = np.array([0, 0, -1 / p.m_b, 1 / p.m_w])
    D = np.array([0, 0, 0, p.k_t / p.m_w])
    return A, B, D


def as_vec(d):
    return np.array(dataclasses.astuple(d))


def test_equilibrium_is_zero(susp):
    assert as_vec(vehicle_derivatives(VehicleState(), 0.0, 0.0, susp)).tolist() == [0, 0, 0, 0]


def test_body_offset_accelerations(susp):
    d = vehicle_derivatives(VehicleState(x_b=0.01), 0.0, 0.0, susp)
    assert d.dv_b == pytest.approx(-0.5488, abs=1e-12)
    assert d.dv_w == pytest.approx(6.9763, abs=1e-4)


def test_road_input_term(susp):
    d = vehicle_derivatives(VehicleState(), 0.0, 0.01, susp)
    assert as_vec(d)[:3].tolist() == [0, 0, 0]
    assert d.dv_w == pytest.approx(67.7966, abs=1e-4)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=6, max_size=6), st.floats(-2e3, 2e3))
def test_matches_state_space_form(vals, f):
    p = SuspensionParams()
    A, B, D = state_space(p)
    w = np.array(vals[:4]) * 0.05
    x_r = vals[4] * 0.05
    got = as_vec(vehicle_derivatives(VehicleState(*w), f, x_r, p))
    np.testing.assert_allclose(got, A @ w + B * f + D * x_r, rtol=1e-12, atol=1e-9)


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-1, 1), min_size=12, max_size=12), st.floats(-3, 3), st.floats(-3, 3))
def test_linearity(vals, alpha, beta):
    p = SuspensionParams()
    w1, w2 = np.array(vals[:4]) * 0.05, np.array(vals[4:8]) * 0.05
    f1, f2, r1, r2 = vals[8] * 1e3, vals[9] * 1e3, vals[10] * 0.05, vals[11] * 0.05
    d1 = as_vec(vehicle_derivatives(VehicleState(*w1), f1, r1, p))
    d2 = as_vec(vehicle_derivatives(VehicleState(*w2), f2, r2, p))
    mixed = as_vec(vehicle_derivatives(VehicleState(*(alpha * w1 + beta * w2)), alpha * f1 + beta * f2,
                                       alpha * r1 + beta * r2, p))
    expected = alpha * d1 + beta * d2
    scale = np.abs(alpha * d1).max() + np.abs(beta * d2).max() + 1e-300
    assert np.abs(mixed - expected).max() <= 1e-12 * scale + 1e-15


@settings(max_examples=200, deadline=None)
@given(st.lists(st.floats(-0.1, 0.1), min_size=4, max_size=4), st.floats(-2e3, 2e3))
def test_body_acceleration_is_derivative_component(w, f):
    s = VehicleState(*w)
    assert body_acceleration(s, f) == vehicle_derivatives(s, f, 0.0).dv_b


def test_body_acceleration_examples(susp):
    assert body_acceleration(VehicleState(), 0.0, susp) == 0.0
    assert body_acceleration(VehicleState(), 375.0, susp) == pytest.approx(-1.0, abs=1e-15)
    assert body_acceleration(VehicleState(x_b=0.01), 0.0, susp) == pytest.approx(-0.5488, abs=1e-12)


def test_tiny_step_is_identity():
    v0 = VehicleState(0.01, -0.002, 0.1, -0.3)
    d0 = DamperState(0.001, 0.002, 1.0)
    v1, d1 = rk4_step(v0, d0, 2.0, BumpProfile(), 0.7, 1e-12)
    diff = np.abs(np.r_[as_vec(v1) - as_vec(v0), as_vec(d1) - as_vec(d0)])
    assert diff.max() < 1e-9


def test_rejects_bad_step():
    with pytest.raises(ValueError):
        rk4_step(VehicleState(), DamperState(), 0.0, ZeroRoad(), 0.0, 0.0)
    with pytest.raises(ValueError):
        rk4_step(VehicleState(), DamperState(), 0.0, ZeroRoad(), 0.0, -1e-3)
    with pytest.raises(ValueError):
        rk4_step(VehicleState(x_b=float("nan")), DamperState(), 0.0, ZeroRoad(), 0.0, 1e-3)
    with pytest.raises(ValueError):
        rk4_step(VehicleState(), DamperState(), 3.5, ZeroRoad(), 0.0, 1e-3)


def integrate_free(w0, dt, duration):
    v, d = VehicleState(*w0), DamperState()
    out = [as_vec(v)]
    for k in range(int(round(duration / dt))):
        v, d = rk4_step(v, d, 0.0, ZeroRoad(), k * dt, dt, force="none")
        out.append(as_vec(v))
    return np.array(out)


def test_linear_subsystem_against_fine_reference(susp):
    # reference: the same linear system advanced by the exact propagator expm(A*dt/100)
    dt, duration = SimConfig().dt_physics, 1.0
    traj = integrate_free([0.01, 0, 0, 0], dt, duration)
    A, _, _ = state_space(susp)
    prop = np.linalg.matrix_power(expm(A * dt / 100), 100)
    ref = [np.array([0.01, 0, 0, 0])]
    for _ in range(len(traj) - 1):
        ref.append(prop @ ref[-1])
    ref = np.array(ref)
    rel = np.abs(traj - ref).max(axis=0) / np.abs(ref).max(axis=0)
    assert rel.max() < 1e-6


def test_energy_drift_without_damping(susp):
    traj = integrate_free([0.01, 0.0, 0.0, 0.0], 1e-3, 5.0)
    e = np.array([mechanical_energy(VehicleState(*w), susp) for w in traj])
    assert np.abs(e / e[0] - 1).max() < 1e-3


def test_halving_dt_on_bump():
    base = SimConfig()
    _, coarse = simulate(base)
    _, fine = simulate(dataclasses.replace(base, dt_physics=base.dt_physics / 2))
    for name in ("rms_ba", "rms_sws", "rms_dtl"):
        a, b = getattr(coarse, name), getattr(fine, name)
        assert abs(a - b) / b < 5e-3
