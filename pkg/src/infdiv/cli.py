"""Command-line interface.

Exit status: 0 success or positive verdict, 1 negative mathematical
verdict, 2 usage error, 3 numerical or bound error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import harness
from .arith import Session, check_bound
from .dsl import parse_fn_expr, to_expr
from .errors import NumericalError, UsageError
from .matrix import (DEFAULT_GRID, InfDivMode, MatrixKind, Verdict, build_matrix, hadamard_power,
                     infdiv_check, min_psd_exponent, psd_check)
from .matrix_io import emit_matrix, read_matrix
from .sets import DEFAULT_CLASS_TOL, IntegerSet, alpha_vector, class_membership

EXIT_OK, EXIT_NEGATIVE, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3
MODES = {"exact": InfDivMode.EXACT, "probe": InfDivMode.GRID, "bisect": InfDivMode.BISECT}
MINR_DEFAULT = "0:1:1e-6"


def _grid(text: str, parts: int = 3) -> tuple[float, ...]:
    try:
        vals = tuple(float(x) for x in text.split(":"))
    except ValueError:
        vals = ()
    if len(vals) != parts:
        raise UsageError(f"--grid expects lo:hi:step, got {text!r}")
    return vals


def _set(args) -> IntegerSet:
    if args.set_file:
        return IntegerSet.load(args.set_file)
    if args.set:
        return IntegerSet.parse(args.set)
    raise UsageError("one of --set or --set-file is required")


def _fn(args):
    if not args.fn:
        raise UsageError("--fn is required")
    return parse_fn_expr(args.fn)


def _matrix(args):
    if getattr(args, "infile", None):
        a = read_matrix(args.infile)
    else:
        a = build_matrix(_fn(args), _set(args), MatrixKind(args.kind))
    if args.hpow is not None:
        a = hadamard_power(a, args.hpow)
    return a


def _emit(args, text: str):
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _dump(args, obj):
    _emit(args, json.dumps(obj) + "\n")


def cmd_eval(args):
    f = _fn(args)
    session = Session()
    try:
        ms = [int(x) for x in args.m.split(",")]
    except ValueError:
        raise UsageError(f"--m must be comma-separated integers, got {args.m!r}") from None
    values = {str(m): session.value(f, check_bound(m)) for m in ms}
    _dump(args, {"fn": to_expr(f), "multiplicative": f.multiplicative.value, "values": values})
    return EXIT_OK


def cmd_classcheck(args):
    rep = class_membership(_fn(args), _set(args), strict=args.strict, tol=args.tol)
    _dump(args, rep.to_dict())
    return EXIT_OK if rep.member else EXIT_NEGATIVE


def cmd_alpha(args):
    _dump(args, alpha_vector(_fn(args), _set(args)).to_dict())
    return EXIT_OK


def cmd_matrix(args):
    _emit(args, emit_matrix(_matrix(args), args.format))
    return EXIT_OK


def cmd_psd(args):
    v = psd_check(_matrix(args), args.tol)
    _dump(args, v.to_dict())
    return EXIT_OK if v.is_psd else EXIT_NEGATIVE


def cmd_infdiv(args):
    grid = _grid(args.grid) if args.grid else DEFAULT_GRID
    v = infdiv_check(_matrix(args), MODES[args.mode], grid, args.tol)
    _dump(args, v.to_dict())
    return EXIT_NEGATIVE if v.verdict is Verdict.NOT_INFDIV else EXIT_OK


def cmd_minr(args):
    lo, hi, eps = _grid(args.grid or MINR_DEFAULT)
    r = min_psd_exponent(_matrix(args), lo, hi, eps, args.tol)
    _dump(args, {"min_r": r, "bracket": [lo, hi], "eps": eps})
    return EXIT_OK


def cmd_verify(args):
    ids = list(harness.STATEMENTS) if "all" in args.statements else args.statements
    for sid in ids:
        if sid not in harness.SUITES:
            raise UsageError(f"unknown statement {sid!r}; choose from all, {', '.join(harness.STATEMENTS)}")
    reports = [harness.run_suite(sid, args.seed) for sid in ids]
    if args.format == "json":
        _dump(args, [r.to_dict() for r in reports])
    else:
        _emit(args, harness.summary_table(reports) + "\n")
    return EXIT_OK if all(r.passed for r in reports) else EXIT_NEGATIVE


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="infdiv", description="GCD/LCM matrices of arithmetical functions: "
                "class membership, PSD and infinite-divisibility checks.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, fn=True, set_=True, matrix=False):
        if set_:
            sp.add_argument("--set", help="comma-separated distinct positive integers, e.g. 6,10,15")
            sp.add_argument("--set-file", help="JSON array of integers")
        if fn:
            sp.add_argument("--fn", help='function expression, e.g. "conv(id, mu)"')
        if matrix:
            sp.add_argument("--kind", choices=[k.value for k in MatrixKind], default="gcd",
                            help="gcd: f(x_i,x_j); rlcm: 1/f[x_i,x_j]; ratio: f(x_i,x_j)/f[x_i,x_j] "
                            "(default: gcd)")
            sp.add_argument("--hpow", type=float, default=None,
                            help="apply the Hadamard power r before testing (default: none)")
            sp.add_argument("--in", dest="infile", help="read the matrix from a CSV or JSON file "
                            "instead of building it")
        sp.add_argument("--out", help="write output to this path instead of stdout")

    sp = sub.add_parser("eval", help="evaluate a function at integers")
    common(sp, set_=False)
    sp.add_argument("--m", required=True, help="comma-separated positive integers")
    sp.set_defaults(func=cmd_eval)

    sp = sub.add_parser("classcheck", help="test membership of f in C_S (or the strict class)")
    common(sp)
    sp.add_argument("--strict", action="store_true", help="require (f*mu)(d) > tol")
    sp.add_argument("--tol", type=float, default=DEFAULT_CLASS_TOL,
                    help=f"tolerance on (f*mu)(d) (default: {DEFAULT_CLASS_TOL})")
    sp.set_defaults(func=cmd_classcheck)

    sp = sub.add_parser("alpha", help="alpha vector of f over S")
    common(sp)
    sp.set_defaults(func=cmd_alpha)

    sp = sub.add_parser("matrix", help="build and print a matrix")
    common(sp, matrix=True)
    sp.add_argument("--format", choices=["csv", "json"], default="csv", help="(default: csv)")
    sp.set_defaults(func=cmd_matrix)

    sp = sub.add_parser("psd", help="positive semi-definiteness by Jacobi eigenvalues")
    common(sp, matrix=True)
    sp.add_argument("--tol", type=float, default=None,
                    help="relative slack; threshold is tol*max(1,||A||_inf) (default: 1e-9*n)")
    sp.set_defaults(func=cmd_psd)

    sp = sub.add_parser("infdiv", help="infinite divisibility of a matrix")
    common(sp, matrix=True)
    sp.add_argument("--mode", choices=sorted(MODES), default="probe",
                    help="exact: log criterion; probe: grid of Hadamard powers; "
                    "bisect: probe then refine the threshold (default: probe)")
    sp.add_argument("--grid", default=None, help="lo:hi:step exponent grid (default: 0:4:0.05)")
    sp.add_argument("--tol", type=float, default=None, help="relative PSD slack (default: 1e-9*n)")
    sp.set_defaults(func=cmd_infdiv)

    sp = sub.add_parser("minr", help="least Hadamard exponent giving a PSD matrix")
    common(sp, matrix=True)
    sp.add_argument("--grid", default=None,
                    help=f"lo:hi:eps bracket and resolution (default: {MINR_DEFAULT})")
    sp.add_argument("--tol", type=float, default=None, help="relative PSD slack (default: 1e-9*n)")
    sp.set_defaults(func=cmd_minr)

    sp = sub.add_parser("verify", help="run the statement checks")
    sp.add_argument("statements", nargs="+", metavar="ID",
                    help="all, or any of: " + ", ".join(harness.STATEMENTS))
    sp.add_argument("--seed", type=int, default=harness.DEFAULT_SEED,
                    help=f"seed for randomized suites (default: {harness.DEFAULT_SEED})")
    sp.add_argument("--format", choices=["text", "json"], default="text", help="(default: text)")
    sp.add_argument("--out", help="write output to this path instead of stdout")
    sp.set_defaults(func=cmd_verify)
    return p


def run_command(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"infdiv: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalError as exc:
        print(f"infdiv: numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


def main():
    sys.exit(run_command())
