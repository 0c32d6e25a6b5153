"""Command-line interface.

Commands::

    norm       --space EXPR --vec FILE [--exact]
    verify     --suite NAME [--seed S] [--trials T] [--tol E]
               [--out PATH] [--format csv|structured]
    decompose  --space EXPR --vec FILE [--max-blocks N]
    spreading  --space EXPR --coeffs LIST --shifts LIST
    dual       --space EXPR --functional FILE [--restarts R]
    report     --in PATH --out PATH --format csv|structured

Exit codes: 0 success, 1 verification failure, 2 usage or configuration
error, 3 numerical non-convergence.  The environment variable
``SPREADLAB_SEED`` overrides the default seed.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path

from .config import DEFAULT
from .decompose import decomposition_check
from .oracles import ConfigurationError
from .projections import dual_norm_lower
from .saturate import NonConvergenceError, SaturatedNorm, saturated_eval
from .schreierify import spreading_profile
from .spaces import ParseError, parse_space, space_oracle
from .suites import SUITE_NAMES, emit_report, parse_report, run_suite
from .vectors import FinVec, parse_vector_mapping

EXIT_OK = 0
EXIT_VERIFICATION_FAILED = 1
EXIT_USAGE = 2
EXIT_NONCONVERGENCE = 3


def load_vector_file(path: str | Path) -> FinVec:
    try:
        doc = json.loads(Path(path).read_text())
    except FileNotFoundError:
        raise ValueError(f"no such file: {path}")
    except json.JSONDecodeError as exc:
        raise ValueError(f"{path}: not valid JSON ({exc})")
    return parse_vector_mapping(doc)


def _parse_rational_list(text: str) -> tuple[Fraction, ...]:
    items = [t.strip() for t in text.split(",") if t.strip()]
    return tuple(Fraction(t) for t in items)


def _parse_int_list(text: str) -> tuple[int, ...]:
    return tuple(int(t.strip()) for t in text.split(",") if t.strip())


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="spreadlab",
        description="evaluate and verify interval-system, admissible-cut and "
                    "saturated norms on finitely supported vectors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_norm = sub.add_parser("norm", help="evaluate a norm on a vector file")
    p_norm.add_argument("--space", required=True)
    p_norm.add_argument("--vec", required=True)
    p_norm.add_argument("--exact", action="store_true",
                        help="print the exact rational value (error if unavailable)")

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("--suite", required=True, choices=SUITE_NAMES)
    p_verify.add_argument("--seed", type=int, default=None)
    p_verify.add_argument("--trials", type=int, default=None)
    p_verify.add_argument("--tol", type=float, default=None)
    p_verify.add_argument("--out", default=None)
    p_verify.add_argument("--format", choices=("csv", "structured"), default="csv")

    p_dec = sub.add_parser("decompose", help="two-sided decomposition bound")
    p_dec.add_argument("--space", required=True)
    p_dec.add_argument("--vec", required=True)
    p_dec.add_argument("--max-blocks", type=int, default=64)
    p_dec.add_argument("--out", default=None)
    p_dec.add_argument("--format", choices=("csv", "structured"), default="csv")

    p_spread = sub.add_parser("spreading", help="norms of a tuple at shifted positions")
    p_spread.add_argument("--space", required=True)
    p_spread.add_argument("--coeffs", required=True,
                          help="comma-separated rationals, e.g. 1,-1,1/2")
    p_spread.add_argument("--shifts", required=True,
                          help="comma-separated 1-based start positions")

    p_dual = sub.add_parser("dual", help="dual-norm lower bound by witness search")
    p_dual.add_argument("--space", required=True)
    p_dual.add_argument("--functional", required=True)
    p_dual.add_argument("--restarts", type=int, default=DEFAULT.search_restarts)

    p_rep = sub.add_parser("report", help="re-emit a structured report")
    p_rep.add_argument("--in", dest="input", required=True,
                       help="structured report file to read")
    p_rep.add_argument("--out", required=True)
    p_rep.add_argument("--format", choices=("csv", "structured"), required=True)

    return parser


def _cmd_norm(args) -> int:
    oracle = space_oracle(args.space)
    x = load_vector_file(args.vec)
    if args.exact:
        exact = oracle.exact_value(x)
        if exact is None:
            print(f"error: {oracle.name} has no exact evaluation path", file=sys.stderr)
            return EXIT_USAGE
        print(f"{exact} (= {float(exact)!r})")
        return EXIT_OK
    if isinstance(oracle, SaturatedNorm):
        res = saturated_eval(oracle, x)
        print(f"{res.value!r} (+{res.eps:g} bracket)")
        return EXIT_OK
    print(repr(oracle.value(x)))
    return EXIT_OK


def _cmd_verify(args) -> int:
    report = run_suite(args.suite, seed=args.seed, trials=args.trials, tol=args.tol)
    print(f"suite {report.suite}: {report.description}")
    print(f"seed={report.seed} trials={report.trials} tol={report.tol:g}")
    failed = [c for c in report.cases if not c.passed]
    for c in failed[:20]:
        print(f"  FAIL {c.case_id}: {c.input} (lhs={c.lhs!r}, rhs={c.rhs!r})")
    print(f"{len(report.cases) - len(failed)}/{len(report.cases)} cases passed "
          f"in {report.wall_time_s:.2f}s")
    if args.out:
        emit_report(report, args.format, args.out)
        print(f"report written to {args.out} ({args.format})")
    return EXIT_OK if report.passed else EXIT_VERIFICATION_FAILED


def _cmd_decompose(args) -> int:
    oracle = space_oracle(args.space)
    x = load_vector_file(args.vec)
    a = x.compact()
    rep = decomposition_check(oracle, a, max(1, args.max_blocks))
    print(f"space: {oracle.name}")
    print(f"x-norm: {rep.x_norm!r}")
    print(f"u-part norm: {rep.u_norm!r}")
    for N, z in rep.z_estimates:
        print(f"block-average estimate N={N}: {z!r}")
    print(f"converged: {'yes' if rep.converged else 'no'}")
    print(f"lower bound (constant 1/2): {'ok' if rep.lower_ok else 'VIOLATED'}")
    print(f"upper bound (constant 2): {'ok' if rep.upper_ok else 'VIOLATED'}")
    if args.out:
        emit_report(report_from_decomposition(rep), args.format, args.out)
        print(f"report written to {args.out} ({args.format})")
    return EXIT_OK if rep.passed else EXIT_VERIFICATION_FAILED


def _cmd_spreading(args) -> int:
    oracle = space_oracle(args.space)
    coeffs = _parse_rational_list(args.coeffs)
    shifts = _parse_int_list(args.shifts)
    if not coeffs or not shifts:
        raise ValueError("need nonempty --coeffs and --shifts")
    values = spreading_profile(oracle, coeffs, shifts)
    for shift, v in zip(shifts, values):
        print(f"shift {shift}: {v!r}")
    return EXIT_OK


def _cmd_dual(args) -> int:
    oracle = space_oracle(args.space)
    f = load_vector_file(args.functional)
    dim = (f.max_support or 1) + 4
    budget = max(1, args.restarts) * 40
    v = dual_norm_lower(f, oracle, dim=dim, budget=budget)
    print(f"dual-norm lower bound on [1,{dim}]: {v!r}")
    return EXIT_OK


def _cmd_report(args) -> int:
    try:
        report = parse_report(Path(args.input).read_text())
    except FileNotFoundError:
        raise ValueError(f"no such file: {args.input}")
    except (json.JSONDecodeError, KeyError, TypeError) as exc:
        raise ValueError(f"{args.input}: not a structured report ({exc})")
    emit_report(report, args.format, args.out)
    print(f"report written to {args.out} ({args.format})")
    return EXIT_OK


_COMMANDS = {
    "norm": _cmd_norm,
    "verify": _cmd_verify,
    "decompose": _cmd_decompose,
    "spreading": _cmd_spreading,
    "dual": _cmd_dual,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except NonConvergenceError as exc:
        print(f"non-convergence: {exc}", file=sys.stderr)
        return EXIT_NONCONVERGENCE
    except (ParseError, ConfigurationError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
