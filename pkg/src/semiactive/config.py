"""Experiment configuration documents (JSON).

A config has up to six sections, each optional, each defaulting field by
field: ``suspension``, ``bouc_wen``, ``road``, ``sim``, ``td3``, ``pso``.
Unknown sections or keys raise ``ValueError``.
"""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields, replace

from .baselines import PsoConfig
from .params import BoucWenParams, SuspensionParams
from .road import BumpProfile, ZeroRoad, make_profile
from .sim import SimConfig
from .td3 import Td3Config

SECTIONS = ("suspension", "bouc_wen", "road", "sim", "td3", "pso")
_SIM_KEYS = ("dt_physics", "control_period", "horizon", "mode", "seed", "observation", "reward_k")


@dataclass(frozen=True)
class ExperimentConfig:
    sim: SimConfig = field(default_factory=SimConfig)
    td3: Td3Config = field(default_factory=Td3Config)
    pso: PsoConfig = field(default_factory=PsoConfig)

    def with_seed(self, seed: int) -> "ExperimentConfig":
        return ExperimentConfig(replace(self.sim, seed=seed), replace(self.td3, seed=seed),
                                replace(self.pso, seed=seed))

    def to_dict(self) -> dict:
        return config_to_dict(self)


def _check_keys(section: str, given: dict, allowed) -> None:
    unknown = set(given) - set(allowed)
    if unknown:
        raise ValueError(f"unknown keys in [{section}]: {sorted(unknown)}")


def _names(cls) -> list[str]:
    return [f.name for f in fields(cls)]


def config_from_dict(doc: dict) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ValueError("config document must be a JSON object")
    _check_keys("top level", doc, SECTIONS)
    sections = {name: dict(doc.get(name) or {}) for name in SECTIONS}

    _check_keys("suspension", sections["suspension"], _names(SuspensionParams))
    _check_keys("bouc_wen", sections["bouc_wen"], _names(BoucWenParams))
    road = sections["road"] or {"kind": "bump"}
    _check_keys("road", road, ["kind"] + _names(BumpProfile))
    _check_keys("sim", sections["sim"], _SIM_KEYS)
    _check_keys("pso", sections["pso"], _names(PsoConfig))

    sim = SimConfig(road=make_profile(road), suspension=SuspensionParams(**sections["suspension"]),
                    bouc_wen=BoucWenParams(**sections["bouc_wen"]), **sections["sim"])
    pso = sections["pso"]
    for key in ("lower", "upper"):
        if key in pso:
            pso[key] = tuple(pso[key])
    return ExperimentConfig(sim, Td3Config.from_dict(sections["td3"]), PsoConfig(**pso))


def config_to_dict(cfg: ExperimentConfig) -> dict:
    sim = cfg.sim
    if isinstance(sim.road, ZeroRoad):
        road = {"kind": "zero"}
    else:
        road = {"kind": "bump", **asdict(sim.road)}
    pso = asdict(cfg.pso)
    pso["lower"], pso["upper"] = list(cfg.pso.lower), list(cfg.pso.upper)
    return {
        "suspension": asdict(sim.suspension),
        "bouc_wen": asdict(sim.bouc_wen),
        "road": road,
        "sim": {k: getattr(sim, k) for k in _SIM_KEYS},
        "td3": cfg.td3.to_dict(),
        "pso": pso,
    }


def load_config(path) -> ExperimentConfig:
    if path is None:
        return ExperimentConfig()
    with open(path) as fh:
        return config_from_dict(json.load(fh))
