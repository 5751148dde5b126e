"""Command-line entry point: ``semiactive <subcommand> ...``."""

from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

from . import baselines, td3
from .config import ExperimentConfig, config_from_dict, config_to_dict, load_config
from .sim import (MetricsReport, SimulationError, Trajectory, compare, format_comparison,
                  simulate)

log = logging.getLogger("semiactive")


def _write_json(path, doc) -> None:
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)
        fh.write("\n")


def _read_json(path) -> dict:
    with open(path) as fh:
        return json.load(fh)


def _experiment(args) -> ExperimentConfig:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.with_seed(args.seed)
    if getattr(args, "strict_observation", False):
        cfg = replace(cfg, sim=replace(cfg.sim, observation="strict"))
    if getattr(args, "episodes", None) is not None:
        cfg = replace(cfg, td3=replace(cfg.td3, episodes=args.episodes))
    return cfg


def _run_record(report: MetricsReport, cfg: ExperimentConfig, **extra) -> dict:
    return {"metrics": report.to_dict(), "config": config_to_dict(cfg), **extra}


def _emit(traj: Trajectory, report: MetricsReport, cfg: ExperimentConfig, out, metrics_out, **extra) -> None:
    if out:
        traj.to_csv(out)
        metrics_out = metrics_out or Path(out).with_suffix(".json")
    if metrics_out:
        _write_json(metrics_out, _run_record(report, cfg, **extra))
    print(json.dumps(report.to_dict(), indent=1))


def _controller(mode: str, args, cfg: ExperimentConfig):
    if mode in ("uncontrolled", "passive-linear"):
        return None
    if mode == "pid":
        if not args.gains:
            raise ValueError("--mode pid needs --gains (a tune-pid output file)")
        gains = baselines.PidGains(**_read_json(args.gains)["gains"])
        return baselines.PidController(gains, cfg.sim.control_period)
    if not args.checkpoint:
        raise ValueError("--mode td3 needs --checkpoint")
    agent, _ = load_checkpoint(args.checkpoint)
    return td3.Td3Controller(agent)


def cmd_simulate(args) -> int:
    cfg = _experiment(args)
    mode = args.mode or cfg.sim.mode
    cfg = replace(cfg, sim=replace(cfg.sim, mode=mode))
    if mode == "td3" and args.checkpoint:
        # observation layout must match what the agent was trained on
        _, saved = load_checkpoint(args.checkpoint)
        cfg = replace(cfg, sim=replace(cfg.sim, observation=saved.sim.observation))
    traj, report = simulate(cfg.sim, _controller(mode, args, cfg), name=args.name or mode)
    _emit(traj, report, cfg, args.out, args.metrics)
    return 0


def save_checkpoint(path, agent: td3.Td3Agent, cfg: ExperimentConfig, returns, evaluation: MetricsReport) -> None:
    doc = td3.agent_to_dict(agent)
    doc["experiment"] = config_to_dict(cfg)
    doc["returns"] = list(returns)
    doc["evaluation"] = evaluation.to_dict()
    _write_json(path, doc)


def load_checkpoint(path) -> tuple[td3.Td3Agent, ExperimentConfig]:
    doc = _read_json(path)
    return td3.agent_from_dict(doc), config_from_dict(doc["experiment"])


def train_and_evaluate(cfg: ExperimentConfig):
    """Train a TD3 agent per ``cfg`` and run its deterministic evaluation episode."""
    from .sim import SuspensionEnv

    sim = replace(cfg.sim, mode="td3")
    agent, returns = td3.train(SuspensionEnv(sim), cfg.td3)
    traj, report = simulate(sim, td3.Td3Controller(agent), name="td3")
    return agent, returns, traj, report


def cmd_train(args) -> int:
    cfg = _experiment(args)
    cfg = replace(cfg, sim=replace(cfg.sim, mode="td3"))
    agent, returns, traj, report = train_and_evaluate(cfg)
    save_checkpoint(args.checkpoint, agent, cfg, returns, report)
    _emit(traj, report, cfg, args.out, args.metrics)
    return 0


def cmd_evaluate(args) -> int:
    agent, cfg = load_checkpoint(args.checkpoint)
    stored = MetricsReport.from_dict(_read_json(args.checkpoint)["evaluation"])
    traj, report = simulate(cfg.sim, td3.Td3Controller(agent), name=args.name or "td3")
    _emit(traj, report, cfg, args.out, args.metrics)
    fields = ("rms_ba", "rms_sws", "rms_dtl", "peak_ba", "peak_sws", "peak_dtl")
    if any(getattr(report, f) != getattr(stored, f) for f in fields):
        print("evaluation does not reproduce the metrics stored at training time", file=sys.stderr)
        return 1
    return 0


def cmd_tune_pid(args) -> int:
    cfg = _experiment(args)
    sim = replace(cfg.sim, mode="pid")
    gains, report, result = baselines.tune_pid_on_bump(sim, cfg.pso)
    doc = baselines.gains_document(gains, report, result, cfg.pso)
    doc["config"] = config_to_dict(cfg)
    if args.out:
        _write_json(args.out, doc)
    print(json.dumps({"gains": doc["gains"], "metrics": doc["metrics"]}, indent=1))
    return 0


def cmd_compare(args) -> int:
    reports = []
    for path in args.runs:
        doc = _read_json(path)
        reports.append(MetricsReport.from_dict(doc["metrics"] if "metrics" in doc else doc))
    table = compare(reports, args.reference)
    print(format_comparison(table))
    if args.out:
        _write_json(args.out, [r.to_dict() for r in table])
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="semiactive", description="MR-damped quarter-car control experiments")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, out_help="trajectory CSV path"):
        sp.add_argument("--config", help="JSON config document")
        sp.add_argument("--seed", type=int)
        sp.add_argument("--out", help=out_help)
        sp.add_argument("--metrics", help="metrics JSON path (default: --out with .json suffix)")

    sp = sub.add_parser("simulate", help="run one bump simulation")
    common(sp)
    sp.add_argument("--mode", choices=("uncontrolled", "passive-linear", "pid", "td3"))
    sp.add_argument("--checkpoint", help="TD3 checkpoint for --mode td3")
    sp.add_argument("--gains", help="tune-pid output for --mode pid")
    sp.add_argument("--name", help="run name recorded in the metrics")
    sp.add_argument("--strict-observation", action="store_true")
    sp.set_defaults(func=cmd_simulate)

    sp = sub.add_parser("train", help="train a TD3 agent and evaluate it")
    common(sp, "evaluation trajectory CSV path")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--episodes", type=int)
    sp.add_argument("--strict-observation", action="store_true")
    sp.set_defaults(func=cmd_train)

    sp = sub.add_parser("evaluate", help="re-run the evaluation episode of a checkpoint")
    sp.add_argument("--checkpoint", required=True)
    sp.add_argument("--out")
    sp.add_argument("--metrics")
    sp.add_argument("--name")
    sp.set_defaults(func=cmd_evaluate)

    sp = sub.add_parser("tune-pid", help="tune PID gains with particle swarm")
    common(sp, "gains JSON path")
    sp.set_defaults(func=cmd_tune_pid)

    sp = sub.add_parser("compare", help="tabulate improvements of runs against a reference")
    sp.add_argument("--runs", nargs="+", required=True, help="metrics JSON files")
    sp.add_argument("--reference", required=True, help="name of the reference run")
    sp.add_argument("--out")
    sp.set_defaults(func=cmd_compare)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (ValueError, KeyError, OSError, SimulationError, RuntimeError, json.JSONDecodeError) as exc:
        print(f"semiactive {args.command}: error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
