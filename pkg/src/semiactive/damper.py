"""Modified Bouc-Wen magnetorheological damper.

The damper carries three internal states: the inner displacement ``y``, the
hysteresis variable ``z`` and the first-order filtered coil voltage ``u``.
The piston displacement is the suspension working space ``x = x_b - x_w``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._accel import njit
from .params import (A_BW, ALPHA_A, ALPHA_B, BETA, C0A, C0B, C1A, C1B, ETA, GAMMA, K0, K1, N_EXP, X0,
                     BoucWenParams, SuspensionParams)

V_MIN = 0.0
V_MAX = 3.0


@dataclass(frozen=True)
class DamperState:
    y: float = 0.0
    z: float = 0.0
    u: float = 0.0


def clamp_voltage(v: float) -> float:
    """Clamp a voltage command into the coil range [0, 3] V."""
    if math.isnan(v):
        raise ValueError("voltage command is NaN")
    return min(max(float(v), V_MIN), V_MAX)


@njit
def coeffs_kernel(u, bw):
    alpha = bw[ALPHA_A] + bw[ALPHA_B] * u
    c1 = bw[C1A] + bw[C1B] * u
    c0 = bw[C0A] + bw[C0B] * u
    return alpha, c1, c0


@njit
def rates_kernel(x, xdot, y, z, u, v, bw):
    """Return (ydot, zdot, udot); zdot uses the ydot computed here."""
    alpha, c1, c0 = coeffs_kernel(u, bw)
    ydot = (alpha * z + bw[K0] * (x - y) + c0 * xdot) / (c1 + c0)
    rel = xdot - ydot
    n = bw[N_EXP]
    az = abs(z)
    zdot = -bw[GAMMA] * abs(rel) * z * az ** (n - 1.0) - bw[BETA] * rel * az ** n + bw[A_BW] * rel
    udot = -bw[ETA] * (u - v)
    return ydot, zdot, udot


@njit
def force_kernel(x, ydot, u, bw):
    c1 = bw[C1A] + bw[C1B] * u
    return c1 * ydot + bw[K1] * (x - bw[X0])


def effective_coeffs(u: float, p: BoucWenParams = BoucWenParams()) -> tuple[float, float, float]:
    """Voltage-dependent ``(alpha, c1, c0)`` at filtered voltage ``u``."""
    return tuple(float(c) for c in coeffs_kernel(float(u), p.as_array()))


def damper_rates(x: float, xdot: float, ds: DamperState, v: float,
                 p: BoucWenParams = BoucWenParams()) -> tuple[float, float, float]:
    """Time derivatives ``(ydot, zdot, udot)`` of the damper internal states.

    Parameters
    ----------
    x, xdot : float
        Suspension working space (m) and its rate (m/s).
    ds : DamperState
        Current internal state.
    v : float
        Commanded coil voltage (V), already clamped by the caller.
    """
    _, c1, c0 = effective_coeffs(ds.u, p)
    if not c1 + c0 > 0:
        raise ValueError(f"degenerate damper: c1 + c0 = {c1 + c0} at u = {ds.u}")
    return tuple(float(r) for r in rates_kernel(float(x), float(xdot), ds.y, ds.z, ds.u, float(v), p.as_array()))


def damper_force(x: float, ds: DamperState, p: BoucWenParams, ydot: float) -> float:
    """Damper force ``c1(u)*ydot + k1*(x - x0)`` (N)."""
    return float(force_kernel(float(x), float(ydot), ds.u, p.as_array()))


def passive_force(v_rel: float, p: SuspensionParams = SuspensionParams()) -> float:
    """Linear passive damper force ``c_s * v_rel`` (N)."""
    return p.c_s * v_rel


@njit
def _sine_kernel(amp, omega, v, dt, nsteps, u0, bw, force, zs, us):
    # state: y, z, u; the piston follows x = amp*sin(omega*t)
    y = 0.0
    z = 0.0
    u = u0
    for k in range(nsteps + 1):
        t = k * dt
        x = amp * math.sin(omega * t)
        xd = amp * omega * math.cos(omega * t)
        ydot, _, _ = rates_kernel(x, xd, y, z, u, v, bw)
        force[k] = force_kernel(x, ydot, u, bw)
        zs[k] = z
        us[k] = u
        if k == nsteps:
            break
        k1 = rates_kernel(x, xd, y, z, u, v, bw)
        th = t + 0.5 * dt
        xh = amp * math.sin(omega * th)
        xdh = amp * omega * math.cos(omega * th)
        k2 = rates_kernel(xh, xdh, y + 0.5 * dt * k1[0], z + 0.5 * dt * k1[1], u + 0.5 * dt * k1[2], v, bw)
        k3 = rates_kernel(xh, xdh, y + 0.5 * dt * k2[0], z + 0.5 * dt * k2[1], u + 0.5 * dt * k2[2], v, bw)
        t1 = t + dt
        k4 = rates_kernel(amp * math.sin(omega * t1), amp * omega * math.cos(omega * t1),
                          y + dt * k3[0], z + dt * k3[1], u + dt * k3[2], v, bw)
        y += dt / 6.0 * (k1[0] + 2.0 * k2[0] + 2.0 * k3[0] + k4[0])
        z += dt / 6.0 * (k1[1] + 2.0 * k2[1] + 2.0 * k3[1] + k4[1])
        u += dt / 6.0 * (k1[2] + 2.0 * k2[2] + 2.0 * k3[2] + k4[2])


def sinusoidal_response(amplitude: float, freq_hz: float, v: float = 0.0, duration: float = 2.0,
                        dt: float = 1e-5, u0: float = 0.0, p: BoucWenParams = BoucWenParams()):
    """Drive the damper alone with ``x(t) = amplitude*sin(2*pi*f*t)`` from rest.

    Returns ``(t, force, z, u)`` sampled every ``dt``. Useful for force-displacement
    and force-velocity loops. ``dt`` must resolve the fast hysteresis
    dynamics: keep ``dt * 2*(beta+gamma)*z_bound*peak_velocity`` below ~2.
    """
    n = int(round(duration / dt))
    force = np.empty(n + 1)
    zs = np.empty(n + 1)
    us = np.empty(n + 1)
    _sine_kernel(float(amplitude), 2.0 * math.pi * freq_hz, clamp_voltage(v), float(dt), n, float(u0),
                 p.as_array(), force, zs, us)
    return np.arange(n + 1) * dt, force, zs, us
