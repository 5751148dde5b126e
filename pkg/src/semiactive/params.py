"""Physical parameter sets for the quarter car, the MR damper and the bump road."""

from __future__ import annotations

import math
from dataclasses import dataclass, fields

import numpy as np


def _check_positive(obj, names):
    for name in names:
        value = getattr(obj, name)
        if not (math.isfinite(value) and value > 0):
            raise ValueError(f"{type(obj).__name__}.{name} must be finite and > 0, got {value!r}")


@dataclass(frozen=True)
class SuspensionParams:
    """Quarter-car masses and stiffnesses (SI units)."""

    m_b: float = 375.0
    m_w: float = 29.5
    k_s: float = 20580.0
    k_t: float = 200000.0
    c_s: float = 772.0

    def __post_init__(self):
        _check_positive(self, ("m_b", "m_w", "k_s", "k_t", "c_s"))

    def as_array(self) -> np.ndarray:
        return np.array([self.m_b, self.m_w, self.k_s, self.k_t, self.c_s], dtype=np.float64)


@dataclass(frozen=True)
class BoucWenParams:
    """Modified Bouc-Wen MR damper constants.

    Voltage-dependent coefficients are affine in the filtered voltage ``u``:
    ``alpha = alpha_a + alpha_b*u``, ``c1 = c1a + c1b*u``, ``c0 = c0a + c0b*u``.
    """

    c0a: float = 784.0
    c0b: float = 1803.0
    c1a: float = 14649.0
    c1b: float = 34622.0
    k0: float = 3610.0
    k1: float = 840.0
    alpha_a: float = 12441.0
    alpha_b: float = 38430.0
    beta: float = 2059020.0
    gamma: float = 136320.0
    eta: float = 190.0
    A_bw: float = 58.0
    n: float = 2.0
    x0: float = 0.245

    def __post_init__(self):
        _check_positive(self, ("c0a", "c1a", "k0", "k1", "eta", "A_bw"))
        for f in fields(self):
            if not math.isfinite(getattr(self, f.name)):
                raise ValueError(f"BoucWenParams.{f.name} must be finite")
        if self.beta + self.gamma <= 0:
            raise ValueError("beta + gamma must be > 0")
        if self.n < 1:
            raise ValueError("n must be >= 1")

    @property
    def z_bound(self) -> float:
        """Ultimate bound of the hysteresis variable, (A/(beta+gamma))**(1/n)."""
        return (self.A_bw / (self.beta + self.gamma)) ** (1.0 / self.n)

    def as_array(self) -> np.ndarray:
        return np.array([getattr(self, f.name) for f in fields(self)], dtype=np.float64)


# index layout of BoucWenParams.as_array(), shared with the kernels
C0A, C0B, C1A, C1B, K0, K1, ALPHA_A, ALPHA_B, BETA, GAMMA, ETA, A_BW, N_EXP, X0 = range(14)
