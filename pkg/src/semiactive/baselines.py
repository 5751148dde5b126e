"""Reference controllers: zero-volt MR-passive and a PSO-tuned PID."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, replace

import numpy as np

from .damper import V_MAX, V_MIN
from .sim import Measurement, MetricsReport, SimConfig, simulate

GAIN_NAMES = ("kp", "ki", "kd")


def uncontrolled_policy(*_args) -> float:
    """MR-passive mode: no voltage on the coil."""
    return 0.0


@dataclass(frozen=True)
class PidGains:
    kp: float = 0.0
    ki: float = 0.0
    kd: float = 0.0

    def __post_init__(self):
        for name in GAIN_NAMES:
            g = getattr(self, name)
            if not (math.isfinite(g) and g >= 0):
                raise ValueError(f"PID gain {name} must be finite and >= 0, got {g!r}")


@dataclass(frozen=True)
class PidState:
    period: float
    integral: float = 0.0
    prev_q: float | None = None

    def __post_init__(self):
        if not self.period > 0:
            raise ValueError("PID period must be > 0")


def pid_step(gains: PidGains, state: PidState, q: float) -> tuple[float, PidState]:
    """One PID update on body acceleration with zero setpoint.

    The error is ``-q``; the derivative acts on the measurement. The output is
    clamped to the coil range. Integration is skipped while the output is
    saturated in the direction the error would push it, and ``ki*integral`` is
    kept inside ``[-V_MAX, V_MAX]``.
    """
    if not math.isfinite(q):
        raise ValueError("measurement is not finite")
    ts = state.period
    e = -q
    deriv = 0.0 if state.prev_q is None else -(q - state.prev_q) / ts
    integral = state.integral + e * ts
    if gains.ki > 0:
        limit = V_MAX / gains.ki
        integral = min(max(integral, -limit), limit)
    raw = gains.kp * e + gains.ki * integral + gains.kd * deriv
    if (raw > V_MAX and e > 0) or (raw < V_MIN and e < 0):
        integral = state.integral
        raw = gains.kp * e + gains.ki * integral + gains.kd * deriv
    v = min(max(raw, V_MIN), V_MAX)
    return v, PidState(ts, integral, q)


class PidController:
    """Adapter running :func:`pid_step` inside :func:`simulate`."""

    def __init__(self, gains: PidGains, period: float):
        self.gains = gains
        self.period = period
        self.reset()

    def reset(self):
        self.state = PidState(self.period)

    def __call__(self, m: Measurement) -> float:
        v, self.state = pid_step(self.gains, self.state, m.q)
        return v


@dataclass(frozen=True)
class PsoConfig:
    swarm_size: int = 30
    iterations: int = 60
    inertia: float = 0.729
    cognitive: float = 1.494
    social: float = 1.494
    lower: tuple = (0.0, 0.0, 0.0)
    upper: tuple = (100.0, 200.0, 10.0)
    seed: int = 0

    def __post_init__(self):
        if self.swarm_size < 2:
            raise ValueError("swarm_size must be >= 2")
        if self.iterations < 1:
            raise ValueError("iterations must be >= 1")
        if len(self.lower) != len(self.upper):
            raise ValueError("lower and upper bounds differ in length")
        if any(not lo < hi for lo, hi in zip(self.lower, self.upper)):
            raise ValueError("every lower bound must be below its upper bound")


@dataclass
class PsoResult:
    best_position: np.ndarray
    best_cost: float
    trace: list[float]
    evaluations: int


def pso_tune(objective, cfg: PsoConfig) -> PsoResult:
    """Global-best particle swarm minimisation over the box ``[lower, upper]``.

    ``cfg.iterations`` counts swarm evaluations, the first being the random
    initial swarm. Positions are clipped to the box after every move and
    non-finite costs count as ``inf``. Raises ``RuntimeError`` if an entire
    swarm evaluates to non-finite costs.
    """
    rng = np.random.default_rng(cfg.seed)
    lo = np.asarray(cfg.lower, dtype=np.float64)
    hi = np.asarray(cfg.upper, dtype=np.float64)
    span = hi - lo
    n, dim = cfg.swarm_size, lo.size

    def evaluate(pos):
        costs = np.array([float(objective(p.copy())) for p in pos])
        bad = ~np.isfinite(costs)
        if bad.all():
            raise RuntimeError("objective returned non-finite values for the whole swarm")
        costs[bad] = np.inf
        return costs

    pos = lo + rng.random((n, dim)) * span
    vel = (rng.random((n, dim)) * 2.0 - 1.0) * 0.1 * span
    cost = evaluate(pos)
    pbest, pbest_cost = pos.copy(), cost.copy()
    g = int(np.argmin(pbest_cost))
    gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
    trace = [gbest_cost]
    for _ in range(cfg.iterations - 1):
        r1 = rng.random((n, dim))
        r2 = rng.random((n, dim))
        vel = (cfg.inertia * vel + cfg.cognitive * r1 * (pbest - pos) + cfg.social * r2 * (gbest - pos))
        vel = np.clip(vel, -span, span)
        pos = np.clip(pos + vel, lo, hi)
        cost = evaluate(pos)
        better = cost < pbest_cost
        pbest[better] = pos[better]
        pbest_cost[better] = cost[better]
        g = int(np.argmin(pbest_cost))
        if pbest_cost[g] < gbest_cost:
            gbest, gbest_cost = pbest[g].copy(), float(pbest_cost[g])
        trace.append(gbest_cost)
    return PsoResult(gbest, gbest_cost, trace, n * cfg.iterations)


def pid_objective(sim_cfg: SimConfig, free=GAIN_NAMES):
    """Cost function ``position -> RMS body acceleration`` for the gains named in ``free``."""
    sim_cfg = replace(sim_cfg, mode="pid")

    def cost(position) -> float:
        gains = PidGains(**dict(zip(free, map(float, position))))
        _, report = simulate(sim_cfg, PidController(gains, sim_cfg.control_period))
        return report.rms_ba

    return cost


def tune_pid_on_bump(sim_cfg: SimConfig, pso_cfg: PsoConfig = PsoConfig(),
                     free=GAIN_NAMES) -> tuple[PidGains, MetricsReport, PsoResult]:
    """Tune PID gains by PSO against RMS body acceleration on ``sim_cfg``'s road.

    Gains not listed in ``free`` stay at zero; ``pso_cfg`` bounds are given in
    the order of ``free``.
    """
    if len(pso_cfg.lower) != len(free):
        raise ValueError(f"PSO bounds have {len(pso_cfg.lower)} dims but {len(free)} free gains")
    result = pso_tune(pid_objective(sim_cfg, free), pso_cfg)
    gains = PidGains(**dict(zip(free, map(float, result.best_position))))
    _, report = simulate(replace(sim_cfg, mode="pid"), PidController(gains, sim_cfg.control_period), name="pso-pid")
    return gains, report, result


def gains_document(gains: PidGains, report: MetricsReport, result: PsoResult, pso_cfg: PsoConfig) -> dict:
    return {
        "gains": asdict(gains),
        "best_cost": result.best_cost,
        "trace": result.trace,
        "metrics": report.to_dict(),
        "pso": {**asdict(pso_cfg), "lower": list(pso_cfg.lower), "upper": list(pso_cfg.upper)},
        "seed": pso_cfg.seed,
    }
