"""Command-line interface: validate | simulate | period | converge.

Exit codes: 0 all checks passed, 1 validation or hypothesis failure,
2 usage or parse error. All commands are deterministic: identical scenario
and flags produce byte-identical output.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys

from .errors import FlownetError, HypothesisError, ScenarioError, SpectralError
from .evolution import l1_norm, propagate
from .scenario import Scenario, load_scenario, validation_summary
from .spectral import (
    asymptotic_period,
    convergence_diagnostic,
    default_sample_times,
    strictly_positive_shortcut,
)

EXIT_OK = 0
EXIT_FAILED = 1
EXIT_USAGE = 2


def _emit(payload: dict, out=None) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True)
    print(text)
    if out is not None:
        with open(out, "w") as fh:
            fh.write(text + "\n")


def _load(args) -> Scenario:
    sc = load_scenario(args.scenario, allow_nonperiodic=args.allow_nonperiodic)
    if args.grid is not None:
        sc = dataclasses.replace(sc, resolution=int(args.grid))
    if args.tol is not None:
        sc = dataclasses.replace(
            sc, tolerances=dataclasses.replace(sc.tolerances, stochastic=args.tol)
        )
    return sc


def _ensure_valid(sc: Scenario, args) -> dict:
    summary = validation_summary(sc)
    if not summary["passed"] and not args.force:
        raise HypothesisError(
            "scenario failed validation (rerun the validate command for details, "
            "or pass --force to proceed anyway)"
        )
    return summary


def _sample_times(sc: Scenario, args):
    return default_sample_times(sc.matrix, per_period=args.samples)


def _require_out(args) -> bool:
    if args.out is None:
        print("error: this command needs --out", file=sys.stderr)
        return False
    return True


def cmd_validate(args) -> int:
    sc = _load(args)
    summary = validation_summary(sc)
    _emit(summary, args.out)
    return EXIT_OK if summary["passed"] else EXIT_FAILED


def cmd_simulate(args) -> int:
    if not _require_out(args):
        return EXIT_USAGE
    sc = _load(args)
    _ensure_valid(sc, args)
    t_end = args.t_end
    if t_end < sc.start_time:
        print(f"error: t-end {t_end} precedes scenario start time {sc.start_time}",
              file=sys.stderr)
        return EXIT_USAGE
    field = propagate(sc.matrix, sc.initial, sc.start_time, t_end, sc.resolution)
    field.write_csv(args.out)
    initial_field = propagate(sc.matrix, sc.initial, sc.start_time, sc.start_time, sc.resolution)
    _, mass0 = l1_norm(initial_field)
    _, mass1 = l1_norm(field)
    drift = abs(mass1 - mass0) / mass0 if mass0 else abs(mass1)
    _emit({
        "out": str(args.out),
        "rows": sc.graph.m * sc.resolution,
        "initial_mass": mass0,
        "final_mass": mass1,
        "relative_drift": drift,
        "t": t_end,
        "s": sc.start_time,
    })
    return EXIT_OK


def cmd_period(args) -> int:
    sc = _load(args)
    _ensure_valid(sc, args)
    times = _sample_times(sc, args)
    report = asymptotic_period(sc.matrix, times, sc.tolerances.zero)
    shortcut = strictly_positive_shortcut(sc.matrix, times, sc.tolerances.zero)
    payload = report.to_json()
    payload["shortcut_applicable"] = shortcut is not None
    payload["shortcut_tau"] = shortcut
    _emit(payload, args.out)
    return EXIT_OK


def cmd_converge(args) -> int:
    if not _require_out(args):
        return EXIT_USAGE
    sc = _load(args)
    _ensure_valid(sc, args)
    if args.tau is None:
        tau = asymptotic_period(sc.matrix, _sample_times(sc, args), sc.tolerances.zero).tau
    else:
        tau = args.tau
    trace = convergence_diagnostic(
        sc.matrix, sc.initial, sc.start_time, tau,
        horizon=args.horizon, N=sc.resolution, stride=args.stride,
    )
    trace.write_csv(args.out)
    _emit({
        "out": str(args.out),
        "tau": tau,
        "points": len(trace.elapsed),
        "final_delta": trace.deviation[-1],
        "min_delta": min(trace.deviation),
        "fitted_rate": trace.rate,
    })
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flownet",
        description="Simulate and analyze transport flows on directed networks "
                    "with time-periodic routing weights.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--scenario", required=True,
                       help="scenario JSON path, or a bundled name: example1 | example2 | junction")
        p.add_argument("--out", default=None,
                       help="output path: CSV for simulate/converge (required there), "
                            "JSON copy of the report otherwise")
        p.add_argument("--grid", type=int, default=None, help="override grid resolution N")
        p.add_argument("--samples", type=int, default=64,
                       help="equispaced support sample times per period (default 64)")
        p.add_argument("--tol", type=float, default=None,
                       help="override the stochasticity tolerance")
        p.add_argument("--force", action="store_true",
                       help="run even if scenario validation fails")
        p.add_argument("--allow-nonperiodic", action="store_true",
                       help="skip the structural 1-periodicity check on weights")

    p = sub.add_parser("validate", help="check stochasticity, support, regularity")
    common(p)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("simulate", help="propagate densities and export a CSV field")
    common(p)
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.set_defaults(fn=cmd_simulate)

    p = sub.add_parser("period", help="compute the asymptotic period report")
    common(p)
    p.set_defaults(fn=cmd_period)

    p = sub.add_parser("converge", help="trace the distance to the tau-shifted flow")
    common(p)
    p.add_argument("--tau", type=int, default=None,
                   help="candidate period (default: computed from the scenario)")
    p.add_argument("--horizon", type=float, default=50.0)
    p.add_argument("--stride", type=float, default=1.0)
    p.set_defaults(fn=cmd_converge)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.fn(args)
    except ScenarioError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (HypothesisError, SpectralError) as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_FAILED
    except FlownetError as err:
        print(f"error: {err}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    raise SystemExit(main())
