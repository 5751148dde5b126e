"""Road elevation profiles.

Profiles are analytic in ``t`` so the integrator samples them exactly at its
stage times. Each profile packs into a small float array that the compiled
kernels understand; :func:`road_elevation` is the kernel-side evaluator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit

ROAD_ZERO = 0.0
ROAD_BUMP = 1.0


@dataclass(frozen=True)
class ZeroRoad:
    """Flat road, x_r = 0 everywhere."""

    def elevation(self, t: float) -> float:
        return 0.0

    def as_array(self) -> np.ndarray:
        return np.array([ROAD_ZERO, 0.0, 0.0, 0.0, 0.0])


@dataclass(frozen=True)
class BumpProfile:
    """Single half-cosine bump.

    Parameters
    ----------
    a : float
        Half of the bump height (m); the peak is ``2*a``.
    d_b : float
        Bump width (m).
    V_c : float
        Vehicle speed (m/s).
    t0 : float
        Time the wheel reaches the bump (s).
    """

    a: float = 0.035
    d_b: float = 0.8
    V_c: float = 0.856
    t0: float = 0.5

    def __post_init__(self):
        for name in ("a", "d_b", "V_c"):
            value = getattr(self, name)
            if not (math.isfinite(value) and value > 0):
                raise ValueError(f"BumpProfile.{name} must be finite and > 0, got {value!r}")
        if not (math.isfinite(self.t0) and self.t0 >= 0):
            raise ValueError("BumpProfile.t0 must be >= 0")

    @property
    def omega_r(self) -> float:
        return 2.0 * math.pi * self.V_c / self.d_b

    @property
    def duration(self) -> float:
        return self.d_b / self.V_c

    @property
    def t_end(self) -> float:
        return self.t0 + self.duration

    def elevation(self, t: float) -> float:
        return road_elevation(self.as_array(), float(t))

    def as_array(self) -> np.ndarray:
        return np.array([ROAD_BUMP, self.a, self.omega_r, self.t0, self.t_end])


@njit
def road_elevation(road, t):
    if road[0] == ROAD_BUMP and road[3] <= t <= road[4]:
        return road[1] * (1.0 - math.cos(road[2] * (t - road[3])))
    return 0.0


def elevation(profile, t: float) -> float:
    """Road height under the wheel at time ``t`` (m)."""
    if t < 0:
        raise ValueError("t must be >= 0")
    return profile.elevation(t)


def make_profile(spec: dict | None):
    """Build a profile from a config mapping ``{"kind": "bump"|"zero", ...}``."""
    spec = dict(spec or {"kind": "bump"})
    kind = spec.pop("kind", "bump")
    if kind == "bump":
        return BumpProfile(**spec)
    if kind == "zero":
        if spec:
            raise ValueError(f"zero road takes no parameters, got {sorted(spec)}")
        return ZeroRoad()
    raise ValueError(f"unknown road kind {kind!r}")
