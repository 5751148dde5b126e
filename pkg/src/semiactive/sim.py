"""Closed-loop simulation: environment, trajectories and ride metrics."""

from __future__ import annotations

from dataclasses import asdict, dataclass, field
from typing import NamedTuple

import numpy as np

from .damper import V_MAX, V_MIN, clamp_voltage
from .dynamics import COLUMNS, MODE_MR, MODE_PASSIVE, NCOL, NSTATE, VehicleState, advance_kernel, record_kernel
from .params import BoucWenParams, SuspensionParams
from .road import BumpProfile

CONTROLLER_MODES = ("uncontrolled", "passive-linear", "pid", "td3")
OBSERVATION_MODES = ("default", "strict")
# fixed observation scales: q (m/s^2), sws (m), sws rate (m/s)
OBS_SCALE = np.array([10.0, 0.05, 1.0])


class SimulationError(RuntimeError):
    pass


@dataclass(frozen=True)
class SimConfig:
    dt_physics: float = 1e-4
    control_period: float = 0.01
    horizon: float = 2.5
    mode: str = "uncontrolled"
    seed: int = 0
    observation: str = "default"
    reward_k: float = 1.0
    road: object = field(default_factory=BumpProfile)
    suspension: SuspensionParams = field(default_factory=SuspensionParams)
    bouc_wen: BoucWenParams = field(default_factory=BoucWenParams)

    def __post_init__(self):
        if not self.dt_physics > 0:
            raise ValueError("dt_physics must be > 0")
        ratio = self.control_period / self.dt_physics
        if not (ratio >= 1 and abs(ratio - round(ratio)) < 1e-9 * ratio):
            raise ValueError("control_period must be an integer multiple of dt_physics")
        steps = self.horizon / self.dt_physics
        if abs(steps - round(steps)) > 1e-6 * steps:
            raise ValueError("horizon must be an integer multiple of dt_physics")
        if isinstance(self.road, BumpProfile) and not self.horizon > self.road.t_end:
            raise ValueError(f"horizon {self.horizon} s must exceed the bump end time {self.road.t_end:.4f} s")
        if self.mode not in CONTROLLER_MODES:
            raise ValueError(f"mode must be one of {CONTROLLER_MODES}, got {self.mode!r}")
        if self.observation not in OBSERVATION_MODES:
            raise ValueError(f"observation must be one of {OBSERVATION_MODES}, got {self.observation!r}")
        if not self.reward_k > 0:
            raise ValueError("reward_k must be > 0")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.dt_physics))

    @property
    def substeps(self) -> int:
        return int(round(self.control_period / self.dt_physics))

    @property
    def n_control(self) -> int:
        return -(-self.n_steps // self.substeps)

    @property
    def obs_dim(self) -> int:
        return 1 if self.observation == "strict" else 3


class Measurement(NamedTuple):
    """What a controller sees at a control instant."""

    t: float
    q: float
    sws: float
    sws_rate: float
    obs: np.ndarray


@dataclass
class Trajectory:
    """Uniformly sampled signals, one row per physics step including t = 0."""

    data: np.ndarray

    def __getattr__(self, name):
        try:
            return self.data[:, COLUMNS.index(name)]
        except ValueError:
            raise AttributeError(name) from None

    def __len__(self):
        return self.data.shape[0]

    def to_csv(self, path) -> None:
        with open(path, "w") as fh:
            fh.write(",".join(COLUMNS) + "\n")
            for row in self.data:
                fh.write(",".join("%.17g" % x for x in row) + "\n")

    @classmethod
    def from_csv(cls, path) -> "Trajectory":
        with open(path) as fh:
            header = fh.readline().strip().split(",")
            if tuple(header) != COLUMNS:
                raise ValueError(f"unexpected trajectory header {header}")
            rows = [[float(x) for x in line.split(",")] for line in fh if line.strip()]
        return cls(np.array(rows, dtype=np.float64).reshape(-1, len(COLUMNS)))


@dataclass
class MetricsReport:
    name: str
    rms_ba: float
    rms_sws: float
    rms_dtl: float
    peak_ba: float
    peak_sws: float
    peak_dtl: float
    reference: str | None = None
    improvement: dict | None = None

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, d: dict) -> "MetricsReport":
        return cls(**d)


def rms(series) -> float:
    x = np.asarray(series, dtype=np.float64)
    if x.size == 0:
        raise ValueError("rms of an empty series")
    return float(np.sqrt(np.mean(x * x)))


def dynamic_tire_load(state: VehicleState, x_r: float, p: SuspensionParams = SuspensionParams()) -> float:
    """Tire deflection force ``k_t*(x_w - x_r)``; positive with the wheel above the road."""
    return p.k_t * (state.x_w - x_r)


def metrics_from_trajectory(traj: Trajectory, name: str = "run") -> MetricsReport:
    q, sws, dtl = traj.q, traj.sws, traj.dtl
    return MetricsReport(name, rms(q), rms(sws), rms(dtl),
                         float(np.max(np.abs(q))), float(np.max(np.abs(sws))), float(np.max(np.abs(dtl))))


def improvement(ref: float, value: float) -> float:
    """Percent reduction of ``value`` relative to ``ref``; negative means worse."""
    return (ref - value) / ref * 100.0


def compare(reports: list[MetricsReport], reference: str) -> list[MetricsReport]:
    """Attach percent improvements versus the report named ``reference``."""
    by_name = {r.name: r for r in reports}
    if reference not in by_name:
        raise KeyError(f"reference run {reference!r} not among {sorted(by_name)}")
    ref = by_name[reference]
    out = []
    for r in reports:
        imp = {"ba": improvement(ref.rms_ba, r.rms_ba),
               "sws": improvement(ref.rms_sws, r.rms_sws),
               "dtl": improvement(ref.rms_dtl, r.rms_dtl)}
        out.append(MetricsReport(**{**r.to_dict(), "reference": reference, "improvement": imp}))
    return out


def format_comparison(reports: list[MetricsReport]) -> str:
    lines = [f"{'Controller':<16}{'BA (m/s^2)':>14}{'SWS (m)':>14}{'DTL (N)':>14}"]
    for r in reports:
        lines.append(f"{r.name:<16}{r.rms_ba:>14.4f}{r.rms_sws:>14.5f}{r.rms_dtl:>14.2f}")
    ref = reports[0].reference if reports else None
    if ref is not None:
        lines.append(f"improvement vs {ref}:")
        for r in reports:
            if r.name == ref:
                continue
            i = r.improvement
            lines.append(f"{r.name:<16}{i['ba']:>13.1f}%{i['sws']:>13.1f}%{i['dtl']:>13.1f}%")
    return "\n".join(lines)


class SuspensionEnv:
    """Quarter car + MR damper on a road, stepped once per control period.

    ``step(v)`` holds the clamped voltage for ``cfg.substeps`` physics steps
    and returns ``(obs, reward, done, info)``. The reward is
    ``-k * mean(q**2)`` over the samples produced during the interval, so it
    is exactly zero only if the body acceleration vanished throughout.
    """

    def __init__(self, cfg: SimConfig):
        self.cfg = cfg
        self._mode = MODE_PASSIVE if cfg.mode == "passive-linear" else MODE_MR
        self._susp = cfg.suspension.as_array()
        self._bw = cfg.bouc_wen.as_array()
        self._road = cfg.road.as_array()
        self._work = np.empty((5, NSTATE))
        self.reset()

    def reset(self) -> np.ndarray:
        self.s = np.zeros(NSTATE)
        self.k = 0
        self.rec = np.zeros((self.cfg.n_steps + 1, NCOL))
        record_kernel(0.0, self.s, 0.0, self._mode, self._susp, self._bw, self._road, self.rec[0])
        return self.measurement().obs

    @property
    def done(self) -> bool:
        return self.k >= self.cfg.n_steps

    @property
    def t(self) -> float:
        return self.k * self.cfg.dt_physics

    def measurement(self) -> Measurement:
        row = self.rec[self.k]
        q, sws = float(row[5]), float(row[4])
        rate = float(self.s[2] - self.s[3])
        if self.cfg.observation == "strict":
            obs = np.array([q / OBS_SCALE[0]])
        else:
            obs = np.array([q, sws, rate]) / OBS_SCALE
        return Measurement(float(row[0]), q, sws, rate, obs)

    def step(self, v: float):
        if self.done:
            raise SimulationError("episode finished; call reset()")
        v = clamp_voltage(v)
        cfg = self.cfg
        if self.k == 0:
            self.rec[0, 7] = v
        n = min(cfg.substeps, cfg.n_steps - self.k)
        bad = advance_kernel(self.s, v, 0.0, cfg.dt_physics, n, self.k, self._mode,
                             self._susp, self._bw, self._road, self.rec, self._work)
        if bad >= 0:
            raise SimulationError(f"non-finite state at t = {bad * cfg.dt_physics:.6g} s: {self.s.tolist()}")
        q = self.rec[self.k + 1:self.k + n + 1, 5]
        self.k += n
        reward = -cfg.reward_k * float(np.mean(q * q))
        return self.measurement().obs, reward, self.done, {"t": self.t}

    def trajectory(self) -> Trajectory:
        return Trajectory(self.rec[:self.k + 1].copy())


class ConstantVoltage:
    """Open-loop controller holding a fixed voltage."""

    def __init__(self, v: float = 0.0):
        if not V_MIN <= v <= V_MAX:
            raise ValueError(f"voltage {v} outside [{V_MIN}, {V_MAX}] V")
        self.v = float(v)

    def reset(self):
        pass

    def __call__(self, m: Measurement) -> float:
        return self.v


def simulate(cfg: SimConfig, controller=None, name: str | None = None) -> tuple[Trajectory, MetricsReport]:
    """Run one closed-loop episode over ``[0, cfg.horizon]``.

    ``controller`` is any callable ``Measurement -> voltage`` (with an
    optional ``reset()``); ``None`` means zero volts.
    """
    if controller is None:
        controller = ConstantVoltage(0.0)
    if hasattr(controller, "reset"):
        controller.reset()
    env = SuspensionEnv(cfg)
    while not env.done:
        env.step(controller(env.measurement()))
    traj = env.trajectory()
    return traj, metrics_from_trajectory(traj, name or cfg.mode)

