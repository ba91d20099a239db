"""Command-line interface: simulate one configuration, re-run benchmark table
rows, or emit a reference target.  Exit codes: 0 success, 1 validation error,
2 numeric failure.
"""

from __future__ import annotations

import argparse
import sys

from .errors import NumericError, ValidationError
from .fock import TruncationPolicy
from .pipeline import (
    load_config,
    reproduce_table1,
    run_pipeline,
    write_results,
    write_wigner_csv,
)
from .targets import GridSpec, codeword, db_to_delta, wigner


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); usage errors are validation
        raise ValidationError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="gkp-breeding",
                     description="Heralded breeding of grid states in a truncated Fock space")
    sub = parser.add_subparsers(dest="command", required=True)

    sim = sub.add_parser("simulate", help="run one pipeline configuration")
    sim.add_argument("--config", required=True, help="input config JSON")
    sim.add_argument("--out", required=True, help="output results JSON")
    sim.add_argument("--wigner", help="optional Wigner CSV of the final state")

    tab = sub.add_parser("table1", help="re-run built-in benchmark rows")
    tab.add_argument("--rows", help="comma-separated row indices or names (default: all)")
    tab.add_argument("--dim", type=int, help="override Fock truncation dimension")
    tab.add_argument("--allow-long", action="store_true",
                     help="include the n=16 rows (a few seconds each at dim 56)")

    tgt = sub.add_parser("target", help="emit a reference codeword target")
    tgt.add_argument("--k", type=int, choices=(0, 1), required=True)
    tgt.add_argument("--delta-db", type=float, required=True,
                     help="peak squeezing in dB; envelope uses the same value")
    tgt.add_argument("--wigner", help="optional Wigner CSV output path")
    return parser


def _cmd_simulate(args) -> int:
    config = load_config(args.config)
    result = run_pipeline(config)
    write_results(result, args.out)
    if args.wigner:
        grid = config.wigner_grid or GridSpec()
        write_wigner_csv(wigner(result.state, grid), args.wigner)
    print(f"total probability  {result.total_probability:.6e}")
    print(f"squeezing          {result.squeezing_db:.2f} dB")
    print(f"fidelity           {result.fidelity:.6f}")
    print(f"damping strength   {result.damping_t:.6f}")
    for rec in result.per_step:
        print(f"  step {rec.label:24s} p = {rec.probability:.6e}  tail = {rec.tail_mass:.2e}")
    if result.warnings:
        print(f"({len(result.warnings)} warning(s) recorded in the results file)")
    return 0


def _cmd_table1(args) -> int:
    rows = None
    if args.rows is not None:
        rows = [item.strip() for item in args.rows.split(",") if item.strip()]
    reports = reproduce_table1(rows=rows, dim=args.dim, allow_long=args.allow_long)
    header = (f"{'row':18s} {'status':8s} {'prob':>11s} {'ref':>9s} {'ratio':>6s} "
              f"{'dB':>6s} {'ref':>5s} {'F':>7s} {'ref':>6s}")
    print(header)
    for r in reports:
        if r.status == "skipped":
            print(f"{r.name:18s} {r.status:8s} {'-':>11s} {r.ref_probability:9.2e} "
                  f"{'-':>6s} {'-':>6s} {r.ref_db:5.1f} {'-':>7s} {r.ref_fidelity:6.3f}")
            continue
        print(f"{r.name:18s} {r.status:8s} {r.probability:11.3e} {r.ref_probability:9.2e} "
              f"{r.ratio:6.3f} {r.db:6.2f} {r.ref_db:5.1f} {r.fidelity:7.4f} {r.ref_fidelity:6.3f}")
    return 0


def _cmd_target(args) -> int:
    policy = TruncationPolicy()
    delta = db_to_delta(args.delta_db)
    state = codeword(args.k, delta, delta, policy)
    print(f"codeword k={args.k} at {args.delta_db:.2f} dB: "
          f"dim {state.dim}, tail mass {state.tail_mass():.3e}")
    if args.wigner:
        write_wigner_csv(wigner(state, GridSpec()), args.wigner)
        print(f"wrote Wigner CSV to {args.wigner}")
    return 0


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "simulate":
            return _cmd_simulate(args)
        if args.command == "table1":
            return _cmd_table1(args)
        return _cmd_target(args)
    except ValidationError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except FileNotFoundError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except NumericError as err:
        print(f"numeric failure: {err}", file=sys.stderr)
        return 2
    except Exception as err:  # anything unexpected counts as numeric failure
        print(f"unexpected failure: {err.__class__.__name__}: {err}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
