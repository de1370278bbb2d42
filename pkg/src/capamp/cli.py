"""Command-line front end: verification suites, threshold sweeps, bound
queries, and superactivation planning.

Exit codes: 0 success, 1 failed check or infeasible parameters, 2 usage or
range errors. Output is deterministic given the flags (and seed): JSON uses
lexicographic key order and CSV uses 17-significant-digit floats.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

from . import bounds, channels, thresholds, verify
from .errors import CapampError, InfeasibleParams


def _emit(payload: dict, out: str | None) -> None:
    text = json.dumps(payload, sort_keys=True, indent=2) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _cmd_verify(args) -> int:
    report = verify.run_suite(
        args.suite, tol=args.tol, seed=args.seed, dim_cap=args.dimension_cap
    )
    for check in report.checks:
        status = "PASS" if check.passed else "FAIL"
        print(
            f"{status} {check.check_id}: expected {check.op} {check.expected}"
            f" (tol {check.tolerance}), got {check.actual}",
            file=sys.stderr,
        )
    print(
        f"suite={report.suite} checks={len(report.checks)}"
        f" overall={'PASS' if report.overall_pass else 'FAIL'}"
        f" wall_time={report.wall_time_s:.2f}s",
        file=sys.stderr,
    )
    _emit(report.as_dict(), args.out)
    return 0 if report.overall_pass else 1


def _cmd_sweep(args) -> int:
    grid = thresholds.sweep(args.kind, args.d, args.resolution)
    if args.out:
        try:
            fh = open(args.out, "w", encoding="utf-8", newline="")
        except OSError as exc:
            print(f"error: cannot write {args.out}: {exc}", file=sys.stderr)
            return 2
        with fh:
            grid.to_csv(fh)
    else:
        grid.to_csv(sys.stdout)
    return 0


def _cmd_bound(args) -> int:
    if args.kind == "transposition":
        _require(args, "q", "d")
        value = bounds.transposition_bound_closed(args.q, args.d)
        payload = {"kind": args.kind, "q": args.q, "d": args.d, "value": value}
    elif args.kind == "depol-upper":
        _require(args, "p", "d")
        value = bounds.depolarizing_upper(args.p, args.d)
        payload = {"kind": args.kind, "p": args.p, "d": args.d, "value": value}
    elif args.kind == "erasure":
        _require(args, "lam", "d")
        value = bounds.erasure_capacity(args.lam, args.d)
        payload = {"kind": args.kind, "lambda": args.lam, "d": args.d, "value": value}
    else:  # beta
        _require(args, "d")
        ch = channels.private_channel((args.d + 1) / (2.0 * args.d), args.d)
        witness = bounds.private_channel_beta_witness(args.d)
        feasible, trx = bounds.verify_beta_witness(ch, witness)
        payload = {
            "kind": args.kind,
            "d": args.d,
            "feasible": feasible,
            "trX": trx,
            "P_upper": math.log2(trx) if feasible else None,
        }
    _emit(payload, args.out)
    return 0


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--" + ("lambda" if n == "lam" else n) for n in missing)
        raise UsageError(f"bound {args.kind} needs {flags}")


class UsageError(Exception):
    """Usage error signalled from inside a command."""


def _cmd_superactivate(args) -> int:
    plan = thresholds.superactivation_plan(args.epsilon, args.n, args.c)
    payload = {
        "kappa": plan.kappa,
        "lambda": plan.lam,
        "N": plan.big_n,
        "certificates": {
            "zero_level_margins": list(plan.zero_level_margins),
            "activation_value": plan.activation_value,
        },
    }
    _emit(payload, args.out)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="capamp",
        description=(
            "Private-state induced channels: verification suites, "
            "amplification sweeps, capacity bounds, superactivation plans."
        ),
    )
    parser.add_argument(
        "--dimension-cap",
        type=int,
        default=None,
        help="guard for state/tensor constructions (default: per-op caps)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument(
        "--suite", choices=sorted(verify.SUITES), default="all"
    )
    p_verify.add_argument("--tol", type=float, default=verify.DEFAULT_TOL)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--out", default=None, help="write JSON here")
    p_verify.set_defaults(func=_cmd_verify)

    p_sweep = sub.add_parser("sweep", help="margin sweep over (0,1)^2")
    p_sweep.add_argument("kind", choices=("erasure", "depol"))
    p_sweep.add_argument("--d", type=int, required=True)
    p_sweep.add_argument("--resolution", type=int, default=200)
    p_sweep.add_argument("--out", default=None, help="write CSV here")
    p_sweep.set_defaults(func=_cmd_sweep)

    p_bound = sub.add_parser("bound", help="query a capacity bound")
    p_bound.add_argument(
        "kind", choices=("transposition", "depol-upper", "erasure", "beta")
    )
    p_bound.add_argument("--q", type=float, default=None)
    p_bound.add_argument("--p", type=float, default=None)
    p_bound.add_argument("--lambda", dest="lam", type=float, default=None)
    p_bound.add_argument("--d", type=int, default=None)
    p_bound.add_argument("--out", default=None)
    p_bound.set_defaults(func=_cmd_bound)

    p_super = sub.add_parser(
        "superactivate", help="plan a zero-rate-to-positive-rate certificate"
    )
    p_super.add_argument("--epsilon", type=float, required=True)
    p_super.add_argument("--n", type=int, required=True)
    p_super.add_argument("--c", type=float, default=0.0)
    p_super.add_argument("--out", default=None)
    p_super.set_defaults(func=_cmd_superactivate)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except InfeasibleParams as exc:
        print(f"infeasible: {exc}", file=sys.stderr)
        return 1
    except (ValueError, CapampError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    entry()
