"""Command-line interface: ``fitzkit <subcommand> ...``.

Exit codes: 0 success, 1 an inequality failed, 2 usage or parse error,
3 numerical non-convergence.
"""
from __future__ import annotations

import argparse
import io
import sys
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np

from .conjugate import GridFunction, biconjugate, brute_conjugate, fast_conjugate
from .core import DEFAULT_TOL, PairedPoint, TolerancePolicy, WeightedNorm, format_xreal
from .fitz import fitzpatrick, gap, monotonically_related_gap, support_shifted, tplus_contains
from .harness.grid import grid_dump
from .harness.io import OperatorFileError, load_hull, load_operator, read_grid_csv, write_grid_csv
from .harness.suites import SUITE_NAMES, SuiteReport, UnknownSuiteError, run_suite
from .hull import ProjectionError, project

EXIT_OK, EXIT_FAIL, EXIT_USAGE, EXIT_NONCONV = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str, what: str) -> np.ndarray:
    try:
        return np.array([float(v) for v in text.split(",")])
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None


def _paired(text: str, n: int, what: str) -> PairedPoint:
    v = _floats(text, what)
    if v.size != 2 * n:
        raise UsageError(f"{what}: expected {2 * n} numbers (x then xstar) for n={n}, got {v.size}")
    return PairedPoint.from_flat(v)


def _emit(args, rows: Sequence[tuple]) -> None:
    """Write ``(name, value)`` pairs as text lines or a one-row CSV."""
    if args.format == "csv":
        sys.stdout.write(",".join(k for k, _ in rows) + "\n")
        sys.stdout.write(",".join(_fmt(v) for _, v in rows) + "\n")
    else:
        for k, v in rows:
            sys.stdout.write(f"{k} {_fmt(v)}\n")


def _fmt(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, int, np.floating)):
        return format_xreal(float(v))
    if isinstance(v, np.ndarray):
        return " ".join(format_xreal(float(x)) for x in v)
    return str(v)


def _tol(args) -> TolerancePolicy:
    try:
        return TolerancePolicy(args.tol_exact, args.tol_iter, args.tol_slack)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


# ---------------------------------------------------------------------------
# subcommands

def cmd_eval(args) -> int:
    tol = _tol(args)
    T = load_operator(args.operator, tol)
    z = _paired(args.z, T.n, "--z")
    _emit(args, [("phi", fitzpatrick(T, z, tol))])
    return EXIT_OK


def cmd_gap(args) -> int:
    tol = _tol(args)
    T = load_operator(args.operator, tol)
    z = _paired(args.z, T.n, "--z")
    _emit(args, [("gap", gap(T, z, tol))])
    return EXIT_OK


def cmd_support(args) -> int:
    tol = _tol(args)
    T = load_operator(args.operator, tol)
    z = _paired(args.z, T.n, "--z")
    p = _paired(args.p, T.n, "--p")
    _emit(args, [("sigma", support_shifted(T, z, p, tol))])
    return EXIT_OK


def cmd_tplus(args) -> int:
    tol = _tol(args)
    T = load_operator(args.operator, tol)
    z = _paired(args.z, T.n, "--z")
    _emit(args, [("member", tplus_contains(T, z, tol)),
                 ("related_gap", monotonically_related_gap(T, z, tol))])
    return EXIT_OK


def cmd_project(args) -> int:
    tol = _tol(args)
    hull = load_hull(args.hull)
    q = _floats(args.q, "--q")
    norm = None if args.delta is None else WeightedNorm(args.delta)
    res = project(hull, q, norm, tol)
    _emit(args, [("distance", res.distance), ("point", res.point), ("kkt_residual", res.kkt_residual)])
    return EXIT_OK


def cmd_conj(args) -> int:
    with open(args.grid, newline="") as fh:
        f = read_grid_csv(fh)
    dual = None
    if args.dual:
        with open(args.dual, newline="") as fh:
            dual = read_grid_csv(fh).coords
    if args.biconjugate:
        out = biconjugate(f, dual)
    else:
        out = (brute_conjugate if args.brute else fast_conjugate)(f, dual)
    buf = io.StringIO()
    write_grid_csv(out, buf)
    sys.stdout.write(buf.getvalue())
    return EXIT_OK


def _report(args, reports: List[SuiteReport]) -> None:
    if args.format == "csv":
        sys.stdout.write(SuiteReport.CSV_HEADER + "\n")
        for r in reports:
            sys.stdout.write(r.csv_row() + "\n")
    else:
        sys.stdout.write("\n".join(r.to_text() for r in reports))


def cmd_check(args) -> int:
    names = SUITE_NAMES if args.suite == "all" else (args.suite,)
    tol = _tol(args)
    replay = Path(args.replay_dir) if args.replay_dir else None
    try:
        reports = [run_suite(n, args.seed, args.count, tol, replay) for n in names]
    except UnknownSuiteError as exc:
        raise UsageError(exc.args[0]) from None
    _report(args, reports)
    codes = {r.exit_code() for r in reports}
    if EXIT_FAIL in codes:
        return EXIT_FAIL
    return EXIT_NONCONV if EXIT_NONCONV in codes else EXIT_OK


def cmd_grid(args) -> int:
    tol = _tol(args)
    T = load_operator(args.operator, tol)
    window = _floats(args.window, "--window")
    if window.size != 4 or window[0] > window[1] or window[2] > window[3]:
        raise UsageError("--window expects xmin,xmax,ymin,ymax")
    if T.n != 1:
        raise UsageError(f"grid needs a one-dimensional operator, got n={T.n}")
    grid_dump(T, window, args.resolution, sys.stdout, tol)
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser

def _add_common(p: argparse.ArgumentParser, suppress: bool) -> None:
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--seed", type=int, default=d(0), help="base seed for randomized suites")
    p.add_argument("--count", type=int, default=d(None), help="instances per suite (suite default if omitted)")
    p.add_argument("--tol-exact", type=float, default=d(DEFAULT_TOL.tol_exact))
    p.add_argument("--tol-iter", type=float, default=d(DEFAULT_TOL.tol_iter))
    p.add_argument("--tol-slack", type=float, default=d(DEFAULT_TOL.tol_slack))
    p.add_argument("--delta", type=float, default=d(None), help="weight of the pair norm for projections")
    p.add_argument("--format", choices=("text", "csv"), default=d("text"))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="fitzkit", description=__doc__.splitlines()[0])
    _add_common(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        p = sub.add_parser(name, help=help_, description=help_)
        _add_common(p, suppress=True)
        p.set_defaults(func=func)
        return p

    zhelp = "paired point as comma-separated x then xstar, e.g. --z=1,-1"
    p = add("eval", cmd_eval, "Fitzpatrick function at z")
    p.add_argument("operator")
    p.add_argument("--z", required=True, help=zhelp)
    p = add("gap", cmd_gap, "coupling gap phi_T(z) - c(z)")
    p.add_argument("operator")
    p.add_argument("--z", required=True, help=zhelp)
    p = add("support", cmd_support, "shifted support function sigma_{T-z}(p)")
    p.add_argument("operator")
    p.add_argument("--z", required=True, help=zhelp)
    p.add_argument("--p", required=True, help="direction, same layout as --z")
    p = add("tplus", cmd_tplus, "membership of z in T+ (points monotonically related to T)")
    p.add_argument("operator")
    p.add_argument("--z", required=True, help=zhelp)
    p = add("project", cmd_project, "projection of q onto a hull file")
    p.add_argument("hull", help='JSON {"points": [[...]], "rays": [[...]]}')
    p.add_argument("--q", required=True, help="query vector, comma-separated")
    p = add("conj", cmd_conj, "discrete conjugate of a grid CSV")
    p.add_argument("grid")
    p.add_argument("--dual", help="grid CSV whose coordinates define the dual grid")
    p.add_argument("--brute", action="store_true", help="use the O(NM) reference transform")
    p.add_argument("--biconjugate", action="store_true", help="output f** on the primal grid")
    p = add("check", cmd_check, "run a verification suite ('all' runs every suite)")
    p.add_argument("suite", help=f"one of: all, {', '.join(SUITE_NAMES)}")
    p.add_argument("--replay-dir", help="write a JSON replay file per failed instance here")
    p = add("grid", cmd_grid, "tabulate phi, c and the gap over a window (n = 1)")
    p.add_argument("operator")
    p.add_argument("--window", required=True, help="xmin,xmax,ymin,ymax")
    p.add_argument("--resolution", type=int, default=21)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (UsageError, OperatorFileError, FileNotFoundError, ValueError) as exc:
        print(f"fitzkit: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ProjectionError as exc:
        print(f"fitzkit: error: {exc}", file=sys.stderr)
        return EXIT_NONCONV


if __name__ == "__main__":
    sys.exit(main())
