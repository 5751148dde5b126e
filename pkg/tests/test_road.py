import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from semiactive.road import BumpProfile, ZeroRoad, elevation, make_profile

BUMP = BumpProfile()


def test_defaults_and_derived():
    assert (BUMP.a, BUMP.d_b, BUMP.V_c, BUMP.t0) == (0.035, 0.8, 0.856, 0.5)
    assert BUMP.omega_r == 2 * np.pi * 0.856 / 0.8
    assert BUMP.t_end == pytest.approx(1.4346, abs=1e-4)


def test_examples():
    assert elevation(BUMP, 0.5) == 0.0
    mid = 0.5 + BUMP.d_b / (2 * BUMP.V_c)
    assert mid == pytest.approx(0.9673, abs=1e-4)
    assert elevation(BUMP, mid) == pytest.approx(0.07, abs=1e-15)
    assert elevation(BUMP, 3.0) == 0.0
    assert elevation(BUMP, 0.0) == 0.0


def test_boundary_continuity():
    for tb in (BUMP.t0, BUMP.t_end):
        assert abs(elevation(BUMP, tb + 1e-9) - elevation(BUMP, tb - 1e-9)) < 1e-8


@given(st.floats(0, 10))
def test_range(t):
    assert 0.0 <= elevation(BUMP, t) <= 2 * BUMP.a


@given(st.floats(0, 1))
def test_symmetry(frac):
    s = frac * BUMP.duration
    assert elevation(BUMP, BUMP.t0 + s) == pytest.approx(elevation(BUMP, BUMP.t_end - s), abs=1e-12)


def test_zero_road_and_factory():
    assert ZeroRoad().elevation(1.0) == 0.0
    assert isinstance(make_profile({"kind": "zero"}), ZeroRoad)
    assert make_profile({"kind": "bump", "a": 0.02}).a == 0.02
    with pytest.raises(ValueError):
        make_profile({"kind": "iso-c"})
    with pytest.raises(ValueError):
        elevation(BUMP, -0.1)


@pytest.mark.parametrize("bad", [{"a": 0.0}, {"d_b": -1.0}, {"V_c": float("nan")}])
def test_invalid_bump(bad):
    with pytest.raises(ValueError):
        BumpProfile(**bad)
