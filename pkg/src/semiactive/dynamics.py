"""Quarter-car equations of motion and the fixed-step RK4 integrator.

The coupled state is a length-7 float array
``[x_b, x_w, v_b, v_w, y, z, u]``: four vehicle states followed by the three
damper states. The kernels below operate on that layout in place.
"""

from __future__ import annotations

import math
from dataclasses import astuple, dataclass

import numpy as np

from ._accel import njit
from .damper import DamperState, force_kernel, rates_kernel
from .params import BoucWenParams, SuspensionParams
from .road import road_elevation

# damper force modes understood by the kernels
MODE_MR = 0
MODE_PASSIVE = 1
MODE_NONE = 2

NSTATE = 7
# trajectory record columns
COLUMNS = ("t", "x_r", "x_b", "x_w", "sws", "q", "f_mr", "v_cmd", "u", "z", "dtl")
NCOL = len(COLUMNS)


@dataclass(frozen=True)
class VehicleState:
    x_b: float = 0.0
    x_w: float = 0.0
    v_b: float = 0.0
    v_w: float = 0.0


@dataclass(frozen=True)
class StateDerivative:
    dx_b: float
    dx_w: float
    dv_b: float
    dv_w: float


def vehicle_derivatives(state: VehicleState, f: float, x_r: float,
                        p: SuspensionParams = SuspensionParams()) -> StateDerivative:
    """Right-hand side of the quarter-car model for damper force ``f`` and road height ``x_r``."""
    spring = p.k_s * (state.x_b - state.x_w)
    return StateDerivative(
        state.v_b,
        state.v_w,
        -(spring + f) / p.m_b,
        (spring + f - p.k_t * (state.x_w - x_r)) / p.m_w,
    )


def body_acceleration(state: VehicleState, f: float, p: SuspensionParams = SuspensionParams()) -> float:
    return -(p.k_s * (state.x_b - state.x_w) + f) / p.m_b


@njit
def suspension_force(s, mode, susp, bw):
    """Return (f, ydot) for coupled state ``s``."""
    if mode == MODE_MR:
        x = s[0] - s[1]
        xdot = s[2] - s[3]
        ydot, _, _ = rates_kernel(x, xdot, s[4], s[5], s[6], 0.0, bw)
        return force_kernel(x, ydot, s[6], bw), ydot
    if mode == MODE_PASSIVE:
        return susp[4] * (s[2] - s[3]), 0.0
    return 0.0, 0.0


@njit
def coupled_rhs(t, s, v, mode, susp, bw, road, out):
    """Fill ``out`` with d/dt of the coupled state; return the suspension force."""
    m_b, m_w, k_s, k_t = susp[0], susp[1], susp[2], susp[3]
    x_r = road_elevation(road, t)
    x = s[0] - s[1]
    xdot = s[2] - s[3]
    if mode == MODE_MR:
        ydot, zdot, udot = rates_kernel(x, xdot, s[4], s[5], s[6], v, bw)
        f = force_kernel(x, ydot, s[6], bw)
    else:
        ydot = 0.0
        zdot = 0.0
        udot = -bw[10] * (s[6] - v)
        f = susp[4] * xdot if mode == MODE_PASSIVE else 0.0
    spring = k_s * x
    out[0] = s[2]
    out[1] = s[3]
    out[2] = -(spring + f) / m_b
    out[3] = (spring + f - k_t * (s[1] - x_r)) / m_w
    out[4] = ydot
    out[5] = zdot
    out[6] = udot
    return f


@njit
def rk4_kernel(s, v, t, dt, mode, susp, bw, road, work):
    """Advance ``s`` in place by one classical RK4 step; ``work`` is a (5, 7) scratch array."""
    k1 = work[0]
    k2 = work[1]
    k3 = work[2]
    k4 = work[3]
    tmp = work[4]
    coupled_rhs(t, s, v, mode, susp, bw, road, k1)
    for i in range(NSTATE):
        tmp[i] = s[i] + 0.5 * dt * k1[i]
    coupled_rhs(t + 0.5 * dt, tmp, v, mode, susp, bw, road, k2)
    for i in range(NSTATE):
        tmp[i] = s[i] + 0.5 * dt * k2[i]
    coupled_rhs(t + 0.5 * dt, tmp, v, mode, susp, bw, road, k3)
    for i in range(NSTATE):
        tmp[i] = s[i] + dt * k3[i]
    coupled_rhs(t + dt, tmp, v, mode, susp, bw, road, k4)
    for i in range(NSTATE):
        s[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i])


@njit
def record_kernel(t, s, v, mode, susp, bw, road, row):
    """Write one trajectory row (see COLUMNS) for state ``s`` at time ``t``."""
    f, _ = suspension_force(s, mode, susp, bw)
    x_r = road_elevation(road, t)
    row[0] = t
    row[1] = x_r
    row[2] = s[0]
    row[3] = s[1]
    row[4] = s[0] - s[1]
    row[5] = -(susp[2] * (s[0] - s[1]) + f) / susp[0]
    row[6] = f
    row[7] = v
    row[8] = s[6]
    row[9] = s[5]
    row[10] = susp[3] * (s[1] - x_r)


@njit
def advance_kernel(s, v, t0, dt, nsteps, step0, mode, susp, bw, road, rec, work):
    """Run ``nsteps`` RK4 steps from step index ``step0`` at constant voltage ``v``.

    Time is ``t0 + k*dt`` for global step ``k`` (no accumulated drift). Rows
    ``step0+1 .. step0+nsteps`` of ``rec`` receive the post-step records.
    Returns -1 on success, else the global step index whose result was not finite.
    """
    for k in range(step0, step0 + nsteps):
        t = t0 + k * dt
        rk4_kernel(s, v, t, dt, mode, susp, bw, road, work)
        for i in range(NSTATE):
            if not math.isfinite(s[i]):
                return k + 1
        record_kernel(t0 + (k + 1) * dt, s, v, mode, susp, bw, road, rec[k + 1])
    return -1


def pack_state(vehicle: VehicleState, damper: DamperState) -> np.ndarray:
    return np.array(astuple(vehicle) + astuple(damper), dtype=np.float64)


def unpack_state(s: np.ndarray) -> tuple[VehicleState, DamperState]:
    return VehicleState(*map(float, s[:4])), DamperState(*map(float, s[4:]))


_MODES = {"mr": MODE_MR, "passive": MODE_PASSIVE, "none": MODE_NONE}


def rk4_step(vehicle: VehicleState, damper: DamperState, v: float, road, t: float, dt: float,
             susp: SuspensionParams = SuspensionParams(), bw: BoucWenParams = BoucWenParams(),
             force: str = "mr") -> tuple[VehicleState, DamperState]:
    """One RK4 step of the coupled vehicle + damper system.

    The voltage ``v`` is held for the whole step and the road is evaluated at
    the stage times. ``force`` selects the suspension element: ``"mr"``
    (Bouc-Wen damper), ``"passive"`` (linear ``c_s``) or ``"none"``.
    """
    if not dt > 0:
        raise ValueError(f"dt must be > 0, got {dt}")
    s = pack_state(vehicle, damper)
    if not np.all(np.isfinite(s)):
        raise ValueError("non-finite state")
    if not 0.0 <= v <= 3.0:
        raise ValueError(f"voltage {v} outside [0, 3] V")
    rk4_kernel(s, float(v), float(t), float(dt), _MODES[force], susp.as_array(), bw.as_array(),
               road.as_array(), np.empty((5, NSTATE)))
    return unpack_state(s)


def mechanical_energy(state: VehicleState, p: SuspensionParams = SuspensionParams()) -> float:
    """Kinetic plus spring energy with the road at zero (J)."""
    return (0.5 * p.m_b * state.v_b ** 2 + 0.5 * p.m_w * state.v_w ** 2
            + 0.5 * p.k_s * (state.x_b - state.x_w) ** 2 + 0.5 * p.k_t * state.x_w ** 2)
