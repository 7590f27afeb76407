"""Command line front end.

Exit codes: 0 success, 1 a verification failed, 2 usage error, 3 numerical
failure.
"""

from __future__ import annotations

import argparse
import contextlib
import logging
import math
import sys
from pathlib import Path

from .differences import absolute_monotonicity_report
from .pmf import (
    NormalizationError,
    OracleTooLarge,
    Params,
    pmf_bruteforce,
    pmf_km_sum,
    pmf_recurrence_table,
)
from .roots import RootFindingError
from .structure import structure_report
from .sweep_fit import (
    DESK_K_MAX,
    SweepError,
    threshold_bracket_scan,
    sufficient_bound_scan,
    fit_inverse_root,
    format_fit,
    select_ks,
    sweep,
    write_fig4,
    write_fig5,
    write_table1,
    write_thresholds_full,
)

EXIT_OK, EXIT_FAILED, EXIT_USAGE, EXIT_NUMERIC = 0, 1, 2, 3

METHODS = ("recurrence", "km", "brute", "all")


class UsageError(Exception):
    pass


@contextlib.contextmanager
def _output(path: str | None):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", newline="") as fh:
            yield fh


def _num(x: float) -> str:
    if not math.isfinite(x):
        raise ArithmeticError(f"non-finite value {x!r} in output")
    return repr(float(x))


def _require(cond: bool, msg: str) -> None:
    if not cond:
        raise UsageError(msg)


def _check_k_range(args, k_floor: int = 2) -> None:
    _require(args.k_min >= k_floor, f"k-min must be >= {k_floor}")
    _require(args.k_max >= args.k_min, "k-max must be >= k-min")
    _require(
        args.k_max <= DESK_K_MAX or args.paper_scale,
        f"k-max above {DESK_K_MAX} needs --paper-scale (runtime grows like k_max**3)",
    )


def cmd_pmf(args) -> int:
    _require(args.k >= 1, "k must be >= 1")
    _require(args.lam >= 0, "lambda must be >= 0")
    n_max = max(3 * args.k, 20) if args.n_max is None else args.n_max
    _require(n_max >= 0, "n-max must be >= 0")
    params = Params(args.k, args.lam)

    columns: dict[str, list[float]] = {}
    if args.method in ("recurrence", "all"):
        columns["p_recurrence"] = [float(v) for v in pmf_recurrence_table(params, n_max).values]
    if args.method in ("km", "all"):
        columns["p_km"] = [pmf_km_sum(params, n) for n in range(n_max + 1)]
    if args.method in ("brute", "all"):
        columns["p_brute"] = [pmf_bruteforce(params, n) for n in range(n_max + 1)]

    with _output(args.out) as out:
        header = ["n", *columns]
        if args.method == "all":
            header.append("max_rel_err")
        out.write(",".join(header) + "\n")
        for n in range(n_max + 1):
            vals = [col[n] for col in columns.values()]
            row = [str(n), *map(_num, vals)]
            if args.method == "all":
                scale = max(1.0, max(abs(v) for v in vals))
                row.append(_num((max(vals) - min(vals)) / scale))
            out.write(",".join(row) + "\n")
    return EXIT_OK


def cmd_diff(args) -> int:
    _require(args.k >= 2, "k must be >= 2")
    _require(args.lam > 0, "lambda must be > 0")
    report = absolute_monotonicity_report(Params(args.k, args.lam))
    cells = [c for c in report.cells if args.m is None or c.m == args.m]
    with _output(args.out) as out:
        out.write("m,n,delta_recursive,delta_closed,rel_err\n")
        for c in cells:
            out.write(f"{c.m},{c.n},{_num(c.delta_recursive)},{_num(c.delta_closed)},{_num(c.rel_err)}\n")
    ok = all(c.delta_recursive > 0 and c.delta_closed > 0 for c in cells)
    return EXIT_OK if ok else EXIT_FAILED


def cmd_verify(args) -> int:
    _require(args.k >= 2, "k must be >= 2")
    _require(args.lam > 0, "lambda must be > 0")
    _require(args.cap is None or args.cap >= 2 * args.k, "cap must be >= 2k")
    rep = structure_report(Params(args.k, args.lam), args.cap)
    n_tight, rel_tight = rep.tightest
    lines = [
        f"k: {args.k}",
        f"lambda: {_num(args.lam)}",
        f"cap: {rep.cap}",
        f"decreasing_block: {rep.decreasing_on_block}",
        f"concave_block: {rep.concave_on_block}",
        f"decreasing_tail_to: {rep.decreasing_tail_to}",
        f"first_violation: {'none' if rep.first_violation is None else rep.first_violation}",
        f"marginal: {' '.join(map(str, rep.marginal)) or 'none'}",
        f"tightest_pair: p_{n_tight} p_{n_tight + 1} rel_gap {rel_tight:.3e}",
        f"verdict: {'decreasing' if rep.decreasing_to_cap else 'not decreasing'}",
    ]
    with _output(args.out) as out:
        out.write("\n".join(lines) + "\n")
    return EXIT_OK if rep.decreasing_to_cap else EXIT_FAILED


def cmd_thresholds(args) -> int:
    _check_k_range(args)
    _require(args.tol > 0, "tol must be > 0")
    rows = sweep(args.k_min, args.k_max, args.tol, jobs=args.jobs)
    with _output(args.out) as out:
        (write_thresholds_full if args.all_columns else write_table1)(rows, out)
    return EXIT_OK


def cmd_fit(args) -> int:
    _check_k_range(args)
    _require(args.tol > 0, "tol must be > 0")
    _require(args.k_max > args.k_min, "fit needs at least two distinct k (degenerate input)")
    _require(args.k_max - args.k_min >= 2, "fit needs at least 3 points")
    ks = select_ks(args.k_min, args.k_max, thin_above=200 if args.thin else None)
    rows = sweep(args.k_min, args.k_max, args.tol, jobs=args.jobs, ks=ks)
    fit = fit_inverse_root([(ts.k, ts.lambda_k1k2) for ts in rows])
    with _output(args.out) as out:
        out.write(format_fit(fit))
    if args.fig_dir is not None:
        fig_dir = Path(args.fig_dir)
        fig_dir.mkdir(parents=True, exist_ok=True)
        with open(fig_dir / "fig4.csv", "w", newline="") as fh:
            write_fig4(rows, fit, fh)
        with open(fig_dir / "fig5.csv", "w", newline="") as fh:
            write_fig5(rows, fit, fh)
    return EXIT_OK


def cmd_conjecture_scan(args) -> int:
    _check_k_range(args)
    _require(args.cap_mult >= 4, "cap-mult must be >= 4")
    thresholds = sweep(args.k_min, args.k_max, args.tol, jobs=args.jobs)
    brackets = threshold_bracket_scan(thresholds, cap_mult=args.cap_mult)
    suff = sufficient_bound_scan(args.k_min, args.k_max, args.cap_mult)
    ok = True
    with _output(args.out) as out:
        out.write(
            "k,lambda_k1k2,decreasing_just_below_root,gap_just_above_root,"
            "lam_below_bound,decreasing_below_bound,lam_9_05,violation_at_9_05,passed\n"
        )
        for b, s in zip(brackets, suff):
            passed = b.passed and s.passed
            ok &= passed
            viol = "none" if s.violation_above is None else str(s.violation_above)
            out.write(
                f"{b.k},{_num(b.lambda_k1k2)},{b.decreasing_below},{_num(b.gap_above)},"
                f"{_num(s.lam_below)},{s.decreasing_below},{_num(s.lam_above)},{viol},{passed}\n"
            )
    return EXIT_OK if ok else EXIT_FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="poisson-order-k",
        description="Scaled pmf, finite differences and decrease thresholds "
                    "of the Poisson distribution of order k.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, k=False, lam=False, k_range=False, tol=False):
        if k:
            p.add_argument("--k", type=int, required=True, help="order k")
        if lam:
            p.add_argument("--lambda", dest="lam", type=float, required=True, help="rate lambda")
        if k_range:
            p.add_argument("--k-min", type=int, required=True)
            p.add_argument("--k-max", type=int, required=True)
            p.add_argument("--jobs", type=int, default=None,
                           help="worker processes (default: all processors)")
            p.add_argument("--paper-scale", action="store_true",
                           help=f"allow k-max above {DESK_K_MAX} (slow)")
        if tol:
            p.add_argument("--tol", type=float, default=1e-12, help="relative root tolerance")
        p.add_argument("--out", default=None, help="output path (default: stdout)")

    p = sub.add_parser("pmf", help="tabulate the scaled pmf")
    common(p, k=True, lam=True)
    p.add_argument("--n-max", type=int, default=None)
    p.add_argument("--method", choices=METHODS, default="recurrence")
    p.set_defaults(func=cmd_pmf)

    p = sub.add_parser("diff", help="finite differences on the first block [1, k]")
    common(p, k=True, lam=True)
    p.add_argument("--m", type=int, default=None, help="restrict to one difference order")
    p.set_defaults(func=cmd_diff)

    p = sub.add_parser("verify", help="check strict decrease of the pmf for n >= k")
    common(p, k=True, lam=True)
    p.add_argument("--cap", type=int, default=None, help="largest n checked (default max(6k, 200))")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("thresholds", help="table of lambda_{k+1,k+2} and 9/(4k-1)")
    common(p, k_range=True, tol=True)
    p.add_argument("--all-columns", action="store_true", help="also write r_k, t_k, 4/(k+1)")
    p.set_defaults(func=cmd_thresholds)

    p = sub.add_parser("fit", help="straight-line fit of 1/lambda_{k+1,k+2} against k")
    common(p, k_range=True, tol=True)
    p.add_argument("--thin", action="store_true", help="log-spaced k above 200")
    p.add_argument("--fig-dir", default=None, help="directory for fig4.csv and fig5.csv")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("conjecture-scan", help="numerical checks around the decrease thresholds")
    common(p, k_range=True, tol=True)
    p.add_argument("--cap-mult", type=int, default=6)
    p.set_defaults(func=cmd_conjecture_scan)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        return args.func(args)
    except UsageError as exc:
        parser.print_usage(sys.stderr)
        print(f"{parser.prog} {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (OracleTooLarge, NormalizationError, RootFindingError, SweepError,
            ArithmeticError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
