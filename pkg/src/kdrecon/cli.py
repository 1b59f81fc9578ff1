"""Command-line entry points.

Subcommands: reconstruct, oracle, experiment, ccr, compare.  Exit codes:
0 success, 1 I/O failure, 2 domain error (machine-readable error.json written
to the output directory when possible).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from .errors import KdreconError
from .scenarios import compare_distributions, load_scenario, run_scenario
from .serialize import write_json

DEFAULT_OUT_ENV = "KDRECON_OUT"


def _add_scenario_args(sub):
    sub.add_argument("--scenario", required=True, help="path to the scenario JSON file")
    sub.add_argument("--out", default=None, help="output directory")
    sub.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    sub.add_argument("--emit-oracle", action="store_true",
                     help="also write the ground-truth distribution")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kdrecon",
        description="Reconstruct quantum pseudo-distributions from weak-measurement data",
    )
    subs = parser.add_subparsers(dest="command", required=True)
    for name, help_text in [
        ("reconstruct", "run a discrete or continuous-variable reconstruction scenario"),
        ("oracle", "write only the ground-truth distribution for a scenario"),
        ("experiment", "run a shot-level photonic experiment scenario"),
        ("ccr", "evaluate the commutation-relation witness for a scenario"),
    ]:
        sub = subs.add_parser(name, help=help_text)
        _add_scenario_args(sub)
    cmp_sub = subs.add_parser("compare", help="diff two pseudo-distribution JSON files")
    cmp_sub.add_argument("path_a")
    cmp_sub.add_argument("path_b")
    cmp_sub.add_argument("--tol", type=float, default=1e-8)
    return parser


def _out_dir(args) -> Path:
    if args.out is not None:
        return Path(args.out)
    return Path(os.environ.get(DEFAULT_OUT_ENV, "kdrecon-out"))


def _run_scenario_command(args, expect_kinds=None, oracle_only=False) -> int:
    out = _out_dir(args)
    try:
        scenario = load_scenario(args.scenario)
        if args.seed is not None:
            scenario = type(scenario)(scenario.kind, scenario.params, args.seed)
        if expect_kinds and scenario.kind not in expect_kinds:
            raise KdreconError(
                f"scenario kind {scenario.kind!r} not valid for this subcommand"
            )
        diag = run_scenario(scenario, out, emit_oracle=args.emit_oracle or oracle_only)
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return 1
    except KdreconError as exc:
        payload = {"error": type(exc).__name__, "message": str(exc)}
        try:
            out.mkdir(parents=True, exist_ok=True)
            write_json(out / "error.json", payload)
        except OSError:
            pass
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return 2
    print(json.dumps(diag, default=str))
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "compare":
        try:
            report = compare_distributions(args.path_a, args.path_b, args.tol)
        except OSError as exc:
            print(f"I/O error: {exc}", file=sys.stderr)
            return 1
        except KdreconError as exc:
            print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
            return 2
        print(json.dumps(report))
        return 0 if report["pass"] else 2
    if args.command == "ccr":
        return _run_scenario_command(args, expect_kinds={"ccr"})
    if args.command == "experiment":
        return _run_scenario_command(args, expect_kinds={"experiment"})
    if args.command == "oracle":
        return _run_scenario_command(args, oracle_only=True)
    return _run_scenario_command(args)


if __name__ == "__main__":
    raise SystemExit(main())
