"""Command-line entry point.

Subcommands: ``table`` (entropy tables), ``curve`` (loss-vs-concentration
curves), ``audit`` (appropriateness audit), ``verify`` (theorem probes),
``builtin`` (print a built-in scenario as JSON).  Exit codes: 0 success,
1 validation/usage error, 2 runtime or fit failure.  Progress goes to
standard error; results go only to the output files.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace

import numpy as np

from .dist import SimplexPoint
from .experiments import (
    CURVE_BUILTINS,
    TABLE_BUILTINS,
    ScenarioError,
    builtin_curve,
    builtin_scenario,
    read_scenario,
    run_appropriateness_audit,
    run_curve,
    run_table,
    run_theorem_report,
    scenario_to_json,
    write_results,
)
from .optimizer import FitError


class _Parser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _progress(line: str) -> None:
    print(line, file=sys.stderr, flush=True)


def _default_jobs() -> int:
    return max(1, os.cpu_count() or 1)


def _build_parser() -> _Parser:
    parser = _Parser(prog="elm-lab", description=__doc__)
    parser.add_argument("--seed", type=int, default=None,
                        help="override the scenario seed (beats ELM_LAB_SEED)")
    sub = parser.add_subparsers(dest="command", required=True)

    p_table = sub.add_parser("table", help="run an entropy table scenario")
    src = p_table.add_mutually_exclusive_group(required=True)
    src.add_argument("--scenario", help="scenario JSON file")
    src.add_argument("--builtin", choices=TABLE_BUILTINS)
    p_table.add_argument("--out", required=True, help="output file")
    p_table.add_argument("--format", choices=("csv", "json"), default="csv")
    p_table.add_argument("--runs", type=int, default=None, help="override run count")
    p_table.add_argument("--jobs", type=int, default=_default_jobs(),
                         help="max parallel cells")

    p_curve = sub.add_parser("curve", help="expected-risk-vs-concentration curves")
    csrc = p_curve.add_mutually_exclusive_group(required=True)
    csrc.add_argument("--builtin", choices=CURVE_BUILTINS)
    csrc.add_argument("--theta-star", help="comma-separated ground truth, e.g. 0.5,0.5")
    p_curve.add_argument("--lambdas", default="0,0.25,0.5,0.75,1",
                         help="comma-separated regularization strengths")
    p_curve.add_argument("--c-min", type=float, default=0.05)
    p_curve.add_argument("--c-max", type=float, default=500.0)
    p_curve.add_argument("--c-steps", type=int, default=400)
    p_curve.add_argument("--shape", default=None,
                         help="comma-separated positive ratios, default all ones")
    p_curve.add_argument("--out", required=True)
    p_curve.add_argument("--format", choices=("csv", "json"), default="csv")

    p_audit = sub.add_parser("audit", help="appropriateness audit of a scenario")
    asrc = p_audit.add_mutually_exclusive_group(required=True)
    asrc.add_argument("--scenario")
    asrc.add_argument("--builtin", choices=TABLE_BUILTINS)
    p_audit.add_argument("--out", required=True)
    p_audit.add_argument("--runs", type=int, default=None)
    p_audit.add_argument("--jobs", type=int, default=_default_jobs())

    p_verify = sub.add_parser("verify", help="run the theorem probes")
    p_verify.add_argument("--out", required=True, help="JSON report path")

    p_builtin = sub.add_parser("builtin", help="print a built-in scenario as JSON")
    p_builtin.add_argument("name", choices=TABLE_BUILTINS + CURVE_BUILTINS)
    return parser


def _load_scenario(args):
    if args.scenario is not None:
        scenario = read_scenario(args.scenario)
    else:
        scenario = builtin_scenario(args.builtin)
    if args.seed is not None:
        scenario = replace(scenario, seed=args.seed)
    elif os.environ.get("ELM_LAB_SEED"):
        scenario = replace(scenario, seed=int(os.environ["ELM_LAB_SEED"]))
    if getattr(args, "runs", None) is not None:
        scenario = replace(scenario, runs=args.runs)
    return scenario


def _parse_floats(text: str, flag: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError as exc:
        raise ScenarioError(f"{flag}: {exc}") from exc


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        if args.command == "table":
            scenario = _load_scenario(args)
            result = run_table(scenario, jobs=args.jobs, progress=_progress)
            write_results(result, args.out, format=args.format)
            _progress(f"wrote {len(result.cells)} cells to {args.out}")
        elif args.command == "curve":
            if args.builtin is not None:
                theta_star, lambdas, c_grid, shape = builtin_curve(args.builtin)
            else:
                probs = _parse_floats(args.theta_star, "--theta-star")
                theta_star = SimplexPoint(probs)
                lambdas = tuple(_parse_floats(args.lambdas, "--lambdas"))
                if args.c_steps < 2 or args.c_min <= 0 or args.c_max <= args.c_min:
                    raise ScenarioError("need 0 < c-min < c-max and c-steps >= 2")
                c_grid = np.geomspace(args.c_min, args.c_max, args.c_steps)
                shape = (np.ones(theta_star.k) if args.shape is None
                         else _parse_floats(args.shape, "--shape"))
            result = run_curve(theta_star, lambdas, c_grid, shape)
            write_results(result, args.out, format=args.format)
            _progress(f"wrote {len(result.lambda_values)} curves to {args.out}")
        elif args.command == "audit":
            scenario = _load_scenario(args)
            report = run_appropriateness_audit(scenario, jobs=args.jobs,
                                               progress=_progress)
            write_results(report, args.out, format="json")
            _progress(f"wrote audit report to {args.out}")
        elif args.command == "verify":
            seed = args.seed
            if seed is None and os.environ.get("ELM_LAB_SEED"):
                seed = int(os.environ["ELM_LAB_SEED"])
            report = run_theorem_report(seed=seed if seed is not None else 0,
                                        progress=_progress)
            write_results(report, args.out, format="json")
            _progress(f"wrote theorem report to {args.out}")
            if not report.all_passed:
                _progress("one or more theorem probes FAILED")
                return 2
        elif args.command == "builtin":
            if args.name in TABLE_BUILTINS:
                print(json.dumps(scenario_to_json(builtin_scenario(args.name)),
                                 indent=2))
            else:
                theta_star, lambdas, c_grid, shape = builtin_curve(args.name)
                print(json.dumps({
                    "curve_id": args.name,
                    "theta_star": [float(p) for p in theta_star.probs],
                    "lambda_values": list(lambdas),
                    "c_min": float(c_grid[0]),
                    "c_max": float(c_grid[-1]),
                    "c_steps": int(c_grid.size),
                    "alpha_shape": [float(a) for a in shape],
                }, indent=2))
    except (ScenarioError, ValueError, OSError) as exc:
        print(f"elm-lab: error: {exc}", file=sys.stderr)
        return 1
    except FitError as exc:
        print(f"elm-lab: fit failure: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
