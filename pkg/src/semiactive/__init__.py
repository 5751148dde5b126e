"""Semi-active quarter-car suspension with a modified Bouc-Wen MR damper.

Controllers: a TD3 agent trained from scratch, a PSO-tuned PID loop on body
acceleration, and the zero-volt MR-passive reference.
"""

from .damper import DamperState, damper_force, damper_rates, effective_coeffs, passive_force
from .dynamics import VehicleState, body_acceleration, rk4_step, vehicle_derivatives
from .params import BoucWenParams, SuspensionParams
from .road import BumpProfile, ZeroRoad, elevation
from .sim import MetricsReport, SimConfig, Trajectory, compare, dynamic_tire_load, rms, simulate

__version__ = "0.1.0"

__all__ = [
    "BoucWenParams", "BumpProfile", "DamperState", "MetricsReport", "SimConfig", "SuspensionParams",
    "Trajectory", "VehicleState", "ZeroRoad", "body_acceleration", "compare", "damper_force", "damper_rates",
    "dynamic_tire_load", "effective_coeffs", "elevation", "passive_force", "rk4_step", "rms", "simulate",
    "vehicle_derivatives",
]
