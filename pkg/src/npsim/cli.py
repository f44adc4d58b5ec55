"""Command-line entry point: ``npsim {run,sweep,render}``.

Exit codes: 0 success, 1 usage/configuration error, 2 data loss.
"""

from __future__ import annotations

import argparse
import hashlib
import json
import sys
from typing import Optional, Sequence

from . import __version__
from .core import ConfigurationError, FailureScenario, NO_FAILURE, StrategyKind
from .metrics import SessionReport, capacity_from_dict, capacity_to_dict, normalized_capacity
from .schedule import build_schedule, render_schedule
from .transport import ExhaustiveSweep, RandomPerSession, SimulationConfig, run_simulation, write_trace

EXIT_OK, EXIT_USAGE, EXIT_DATA_LOSS = 0, 1, 2
STRATEGIES = [s.value for s in StrategyKind]


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, separators=(",", ":")).encode()
    return hashlib.sha256(blob).hexdigest()


def manifest(config: dict) -> dict:
    return {"config": config, "tool_version": __version__, "config_hash": config_hash(config)}


def parse_fail(text: str):
    if text == "none":
        return NO_FAILURE
    if text == "random":
        return RandomPerSession()
    if text.startswith("path="):
        try:
            return FailureScenario(int(text[5:]))
        except ValueError:
            pass
    raise UsageError(f"--fail expects none, random or path=P, got {text!r}")


def _check_dedicated(strategy: StrategyKind, dedicated: Optional[int]) -> None:
    if dedicated is not None and strategy is not StrategyKind.NPS1_DEDICATED:
        raise UsageError("--dedicated-path only applies to nps1-dedicated")


def _dump(doc: dict, out: Optional[str]) -> None:
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if out is None:
        sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def build_run_report(config: SimulationConfig, reports: Sequence[SessionReport]) -> dict:
    cfg = config.to_dict()
    return {
        "manifest": manifest(cfg),
        "sessions": [r.to_dict() for r in reports],
        "aggregate": {
            "capacity": capacity_to_dict(normalized_capacity(config.schedule())),
            "all_recovered": all(r.recovery_success for r in reports),
        },
    }


def parse_run_report(doc: dict) -> dict:
    """Inverse of :func:`build_run_report` (config and sessions as objects)."""
    return {
        "config": SimulationConfig.from_dict(doc["manifest"]["config"]),
        "tool_version": doc["manifest"]["tool_version"],
        "config_hash": doc["manifest"]["config_hash"],
        "sessions": [SessionReport.from_dict(s) for s in doc["sessions"]],
        "capacity": capacity_from_dict(doc["aggregate"]["capacity"]),
        "all_recovered": doc["aggregate"]["all_recovered"],
    }


def exit_code_for(doc: dict) -> int:
    return EXIT_OK if doc["aggregate"]["all_recovered"] else EXIT_DATA_LOSS


def cmd_run(args) -> int:
    strategy = StrategyKind.parse(args.strategy)
    _check_dedicated(strategy, args.dedicated_path)
    config = SimulationConfig(
        n=args.paths,
        strategy=strategy,
        dedicated_path=args.dedicated_path,
        sessions=args.sessions,
        failure=parse_fail(args.fail),
        payload_width=args.payload_bytes,
        rng_seed=args.seed,
    )
    trace, reports = run_simulation(config)
    doc = build_run_report(config, reports)
    _dump(doc, args.out)
    if args.trace:
        with open(args.trace, "w") as fh:
            write_trace(fh, trace, config.schedule(), doc["manifest"]["config_hash"])
    return exit_code_for(doc)


def run_sweep(
    strategies: Sequence[StrategyKind], n_min: int, n_max: int, seed: int = 0, payload_width: int = 8
) -> dict:
    if n_min > n_max:
        raise UsageError(f"--paths-min {n_min} > --paths-max {n_max}")
    if n_min < 2:
        raise ConfigurationError(f"need at least 2 disjoint paths, got n={n_min}")
    params = {
        "strategies": [s.value for s in strategies],
        "paths_min": n_min,
        "paths_max": n_max,
        "seed": seed,
        "payload_width": payload_width,
    }
    capacity, scenarios = [], []
    for strategy in strategies:
        for n in range(n_min, n_max + 1):
            config = SimulationConfig(
                n, strategy, failure=ExhaustiveSweep(), payload_width=payload_width, rng_seed=seed
            )
            _, reports = run_simulation(config)
            cap = normalized_capacity(config.schedule())
            capacity.append({"strategy": strategy.value, "n": n, "capacity": capacity_to_dict(cap)})
            scenarios.extend(r.to_dict() for r in reports)
    return {
        "manifest": manifest(params),
        "scenarios": scenarios,
        "aggregate": {
            "capacity_table": capacity,
            "recovery_matrix": [
                {
                    "strategy": s["strategy"],
                    "n": s["n"],
                    "failed_path": s["failed_path"],
                    "recovered": s["recovery_success"],
                }
                for s in scenarios
            ],
            "all_recovered": all(s["recovery_success"] for s in scenarios),
        },
    }


def cmd_sweep(args) -> int:
    names = args.strategy or ["all"]
    strategies = list(StrategyKind) if "all" in names else [StrategyKind.parse(s) for s in names]
    doc = run_sweep(strategies, args.paths_min, args.paths_max, args.seed, args.payload_bytes)
    _dump(doc, args.out)
    return exit_code_for(doc)


def cmd_render_schedule(args) -> int:
    strategy = StrategyKind.parse(args.strategy)
    _check_dedicated(strategy, args.dedicated_path)
    dedicated = args.dedicated_path
    if strategy is StrategyKind.NPS1_DEDICATED and dedicated is None:
        dedicated = args.paths
    schedule = build_schedule(strategy, args.paths, dedicated)
    print(render_schedule(schedule))
    print(f"normalized capacity: {normalized_capacity(schedule)}")
    return EXIT_OK


def make_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="npsim", description="Network-coding single-link-failure protection simulator")
    p.add_argument("--version", action="version", version=f"npsim {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    run = sub.add_parser("run", help="simulate sessions and write a report")
    run.add_argument("--strategy", required=True, choices=STRATEGIES)
    run.add_argument("--paths", type=int, required=True)
    run.add_argument("--sessions", type=int, default=1)
    run.add_argument("--fail", default="none", help="none | path=P | random")
    run.add_argument("--seed", type=int, default=0)
    run.add_argument("--payload-bytes", type=int, default=8)
    run.add_argument("--dedicated-path", type=int)
    run.add_argument("--out", help="report file (default: stdout)")
    run.add_argument("--trace", help="line-delimited JSON trace file")
    run.set_defaults(func=cmd_run)

    sweep = sub.add_parser("sweep", help="every n and failure position, one session each")
    sweep.add_argument("--strategy", action="append", choices=STRATEGIES + ["all"])
    sweep.add_argument("--paths-min", type=int, required=True)
    sweep.add_argument("--paths-max", type=int, required=True)
    sweep.add_argument("--seed", type=int, default=0)
    sweep.add_argument("--payload-bytes", type=int, default=8)
    sweep.add_argument("--out")
    sweep.set_defaults(func=cmd_sweep)

    render = sub.add_parser("render", help="print one session's schedule table")
    render.add_argument("--strategy", required=True, choices=STRATEGIES)
    render.add_argument("--paths", type=int, required=True)
    render.add_argument("--dedicated-path", type=int)
    render.set_defaults(func=cmd_render_schedule)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    try:
        args = make_parser().parse_args(argv)
        return args.func(args)
    except (UsageError, ConfigurationError) as exc:
        print(f"npsim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
