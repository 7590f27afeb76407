"""
Sweeps of the threshold rates over k, the straight-line fit of
``1 / lambda_k1k2`` against ``k``, and the scans around the decrease thresholds.

Writers at the bottom produce the CSV and text files the command line emits.
"""

from __future__ import annotations

import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .pmf import Params
from .roots import ThresholdSet, bound_sufficient, gap_k1k2, threshold_set
from .structure import structure_report

__all__ = [
    "SweepError",
    "FitResult",
    "SufficientBoundRow",
    "BracketRow",
    "sweep",
    "select_ks",
    "fit_inverse_root",
    "sufficient_bound_scan",
    "threshold_bracket_scan",
    "write_table1",
    "write_thresholds_full",
    "write_fig4",
    "write_fig5",
    "format_fit",
]

log = logging.getLogger(__name__)

DESK_K_MAX = 2000


class SweepError(RuntimeError):
    def __init__(self, k: int, cause: Exception):
        super().__init__(f"k={k}: {cause}")
        self.k = k
        self.cause = cause


def _solve_one(args: tuple[int, float]) -> ThresholdSet:
    k, rel_tol = args
    try:
        return threshold_set(k, rel_tol)
    except Exception as exc:  # tag the offending k, keep the original cause
        raise SweepError(k, exc) from exc


def select_ks(k_min: int, k_max: int, thin_above: int | None = None,
              n_log: int = 300) -> list[int]:
    """Every k up to ``thin_above``, then ``n_log`` log-spaced k values beyond it."""
    if not 2 <= k_min <= k_max:
        raise ValueError(f"need 2 <= k_min <= k_max, got {k_min}, {k_max}")
    if thin_above is None or k_max <= thin_above:
        return list(range(k_min, k_max + 1))
    dense = list(range(k_min, min(thin_above, k_max) + 1))
    start = max(thin_above + 1, k_min)
    sparse = np.unique(np.round(np.geomspace(start, k_max, n_log)).astype(int))
    return dense + [int(k) for k in sparse]


def sweep(
    k_min: int,
    k_max: int,
    rel_tol: float = 1e-12,
    jobs: int | None = 1,
    ks: Iterable[int] | None = None,
) -> list[ThresholdSet]:
    """One :class:`ThresholdSet` per k, ordered by k.

    ``jobs`` > 1 spreads the roots over worker processes; every root is a
    pure function of ``(k, rel_tol)``, so the output does not depend on it.
    ``jobs=None`` uses all processors.
    """
    if ks is None:
        if not 2 <= k_min <= k_max:
            raise ValueError(f"need 2 <= k_min <= k_max, got {k_min}, {k_max}")
        ks = range(k_min, k_max + 1)
    ks = sorted(set(int(k) for k in ks))
    if ks and ks[-1] > DESK_K_MAX:
        log.warning("sweeping up to k=%d; cost grows like k_max**3", ks[-1])
    if jobs is None:
        jobs = os.cpu_count() or 1
    tasks = [(k, rel_tol) for k in ks]
    if jobs <= 1 or len(tasks) < 2:
        return [_solve_one(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_solve_one, tasks, chunksize=max(1, len(tasks) // (8 * jobs))))


@dataclass(frozen=True)
class FitResult:
    """Least-squares line ``alpha * k + beta`` through ``1 / lambda_k1k2``.

    Residuals are signed as ``fit - 1/lambda``.
    """

    alpha: float
    beta: float
    max_residual: float
    min_residual: float
    k_range: tuple[int, int]
    ks: np.ndarray
    residuals: np.ndarray

    @property
    def n_points(self) -> int:
        return len(self.ks)

    def __call__(self, k):
        return self.alpha * np.asarray(k, dtype=float) + self.beta


def fit_inverse_root(data: Sequence[tuple[int, float]]) -> FitResult:
    """Ordinary least squares of ``y = 1/lambda`` on ``x = k``.

    >>> fit = fit_inverse_root([(k, 1 / (2 * k + 1)) for k in (1, 2, 3)])
    >>> round(fit.alpha, 12), round(fit.beta, 12)
    (2.0, 1.0)
    """
    if len(data) < 3:
        raise ValueError(f"need at least 3 points, got {len(data)}")
    ks = np.array([k for k, _ in data], dtype=float)
    lams = np.array([lam for _, lam in data], dtype=float)
    if np.any(lams <= 0):
        raise ValueError("all lambda values must be > 0")
    if np.all(ks == ks[0]):
        raise ValueError("degenerate input: all k values are equal")
    y = 1.0 / lams
    design = np.column_stack([ks, np.ones_like(ks)])
    (alpha, beta), *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = alpha * ks + beta - y
    return FitResult(
        alpha=float(alpha),
        beta=float(beta),
        max_residual=float(resid.max()),
        min_residual=float(resid.min()),
        k_range=(int(ks.min()), int(ks.max())),
        ks=ks.astype(int),
        residuals=resid,
    )


@dataclass(frozen=True)
class SufficientBoundRow:
    k: int
    lam_below: float
    decreasing_below: bool
    lam_above: float
    violation_above: int | None

    @property
    def passed(self) -> bool:
        return self.decreasing_below and self.violation_above is not None


def sufficient_bound_scan(k_min: int, k_max: int, cap_mult: int = 6) -> list[SufficientBoundRow]:
    """Per k: just below ``9/(4k-1)`` the pmf should decrease for all n >= k
    (checked up to ``cap_mult * k``), and at ``9.05/(4k-1)`` it should not."""
    if not 2 <= k_min <= k_max:
        raise ValueError(f"need 2 <= k_min <= k_max, got {k_min}, {k_max}")
    if cap_mult < 4:
        raise ValueError(f"cap_mult must be >= 4, got {cap_mult}")
    rows = []
    for k in range(k_min, k_max + 1):
        cap = cap_mult * k
        below = bound_sufficient(k) * (1 - 1e-9)
        above = 9.05 / (4 * k - 1)
        rows.append(SufficientBoundRow(
            k=k,
            lam_below=below,
            decreasing_below=structure_report(Params(k, below), cap).decreasing_to_cap,
            lam_above=above,
            violation_above=structure_report(Params(k, above), cap).first_violation,
        ))
    return rows


@dataclass(frozen=True)
class BracketRow:
    k: int
    lambda_k1k2: float
    decreasing_below: bool
    gap_above: float

    @property
    def passed(self) -> bool:
        return self.decreasing_below and self.gap_above > 0


def threshold_bracket_scan(
    thresholds: Iterable[ThresholdSet],
    cap_mult: int = 6,
    below: float = 1e-6,
    above: float = 1e-3,
) -> list[BracketRow]:
    """Check the open interval ``(0, lambda_k1k2)`` from both sides.

    At ``(1 - below) * lambda_k1k2`` the pmf must decrease strictly on
    ``[k, cap_mult * k]``; at ``(1 + above) * lambda_k1k2`` the pair
    ``p_{k+1}, p_{k+2}`` must already be increasing.
    """
    rows = []
    for ts in thresholds:
        k, root = ts.k, ts.lambda_k1k2
        rep = structure_report(Params(k, root * (1 - below)), max(cap_mult * k, 2 * k))
        rows.append(BracketRow(k, root, rep.decreasing_to_cap, gap_k1k2(k, root * (1 + above))))
    return rows


# -- writers -----------------------------------------------------------------

def _g(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"refusing to write non-finite value {x!r}")
    return repr(float(x))


def _f9(x: float) -> str:
    if not np.isfinite(x):
        raise ValueError(f"refusing to write non-finite value {x!r}")
    return f"{x:.9f}"


def write_table1(rows: Iterable[ThresholdSet], out: IO[str]) -> None:
    out.write("k,lambda_k1k2,nine_over_4km1,difference\n")
    for ts in rows:
        out.write(f"{ts.k},{_f9(ts.lambda_k1k2)},{_f9(ts.bound_sufficient)},{_f9(ts.difference)}\n")


def write_thresholds_full(rows: Iterable[ThresholdSet], out: IO[str]) -> None:
    out.write("k,r_k,t_k,lambda_k1k2,nine_over_4km1,four_over_kp1,difference\n")
    for ts in rows:
        out.write(",".join([
            str(ts.k), _g(ts.r_k), _g(ts.t_k), _g(ts.lambda_k1k2),
            _g(ts.bound_sufficient), _g(ts.bound_necessary), _g(ts.difference),
        ]) + "\n")


def write_fig4(rows: Sequence[ThresholdSet], fit: FitResult, out: IO[str]) -> None:
    out.write("k,inv_lambda,fit_value\n")
    for ts in rows:
        out.write(f"{ts.k},{_g(1.0 / ts.lambda_k1k2)},{_g(fit(ts.k))}\n")


def write_fig5(rows: Sequence[ThresholdSet], fit: FitResult, out: IO[str]) -> None:
    out.write("k,fit_minus_inv_lambda\n")
    for ts in rows:
        out.write(f"{ts.k},{_g(fit(ts.k) - 1.0 / ts.lambda_k1k2)}\n")


def format_fit(fit: FitResult) -> str:
    return (
        f"alpha: {_g(fit.alpha)}\n"
        f"beta: {_g(fit.beta)}\n"
        f"max_residual: {_g(fit.max_residual)}\n"
        f"min_residual: {_g(fit.min_residual)}\n"
        f"k_range: {fit.k_range[0]} {fit.k_range[1]}\n"
        f"n_points: {fit.n_points}\n"
    )
