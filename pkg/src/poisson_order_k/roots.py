"""
Characteristic rates of the order-k scaled pmf.

* ``r_k``: the rate at which ``p_k = h_k(k; lam) = 1``;
* ``t_k``: the rate at which ``p_k = 2``;
* ``lambda_k1k2``: the positive root of ``p_{k+2} - p_{k+1} = 0``.

The first two come from a positive-coefficient polynomial, so the root is
unique and bracketed by ``[0, c]``. The last is bracketed by a tiny rate
(where ``p_{k+2} - p_{k+1} ~ -lam^2 / 2``) and the necessary bound
``4 / (k + 1)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .pmf import Params, pmf_km_sum, pmf_recurrence_table

__all__ = [
    "RootFindingError",
    "NoSignChange",
    "MaxIterations",
    "ThresholdSet",
    "solve_monotone_root",
    "gap_k1k2",
    "solve_lambda_k1k2",
    "solve_pk_level",
    "threshold_set",
    "verify_uniqueness",
    "count_sign_changes",
    "bound_necessary",
    "bound_sufficient",
]

LAMBDA_FLOOR = 1e-9


class RootFindingError(ArithmeticError):
    pass


class NoSignChange(RootFindingError):
    """The function has the same sign at both ends of the bracket."""


class MaxIterations(RootFindingError):
    pass


def bound_necessary(k: int) -> float:
    """Upper bound 4/(k+1) on the decrease supremum."""
    return 4.0 / (k + 1)


def bound_sufficient(k: int) -> float:
    """Conjectured safe rate 9/(4k-1)."""
    return 9.0 / (4 * k - 1)


def solve_monotone_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    rel_tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Bracketed root of ``f`` on ``[lo, hi]``.

    Illinois false position with a bisection fallback whenever the bracket
    fails to halve over two steps. Trial points are kept at least a quarter
    of the target width away from the bracket ends, so once the iterate sits
    next to the root the far side is sampled and the bracket collapses.
    Returns the midpoint of the final bracket, whose width is at most
    ``rel_tol * max(|lo|, |hi|)`` (or an exact zero if one is hit).
    """
    if not rel_tol > 0:
        raise ValueError(f"rel_tol must be > 0, got {rel_tol}")
    if not lo < hi:
        raise ValueError(f"need lo < hi, got [{lo}, {hi}]")
    flo, fhi = f(lo), f(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if math.isnan(flo) or math.isnan(fhi) or (flo > 0) == (fhi > 0):
        raise NoSignChange(f"f({lo})={flo} and f({hi})={fhi} do not bracket a root")

    side = 0
    slow = 0
    width = hi - lo
    for _ in range(max_iter):
        target = rel_tol * max(abs(lo), abs(hi))
        if hi - lo <= target:
            return 0.5 * (lo + hi)
        if slow >= 2:
            x = 0.5 * (lo + hi)
            slow = 0
        else:
            x = (lo * fhi - hi * flo) / (fhi - flo)
        guard = 0.25 * target
        x = min(max(x, lo + guard), hi - guard)
        fx = f(x)
        if fx == 0:
            return x
        if math.isnan(fx):
            raise RootFindingError(f"f({x}) is NaN")
        if (fx > 0) == (flo > 0):
            lo, flo = x, fx
            if side == -1:
                fhi *= 0.5
            side = -1
        else:
            hi, fhi = x, fx
            if side == 1:
                flo *= 0.5
            side = 1
        new_width = hi - lo
        slow = slow + 1 if new_width > 0.5 * width else 0
        width = new_width
    raise MaxIterations(f"no convergence in {max_iter} iterations; bracket [{lo}, {hi}]")


def gap_k1k2(k: int, lam: float) -> float:
    """``p_{k+2} - p_{k+1}`` from a single recurrence table."""
    p = pmf_recurrence_table(Params(k, lam), k + 2).values
    return float(p[k + 2] - p[k + 1])


def solve_lambda_k1k2(k: int, rel_tol: float = 1e-12, max_doublings: int = 60) -> float:
    """Positive root of ``p_{k+2} = p_{k+1}``."""
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    lo, hi = LAMBDA_FLOOR, bound_necessary(k)
    f = lambda lam: gap_k1k2(k, lam)  # noqa: E731
    if f(lo) >= 0:
        raise NoSignChange(f"bracket failure for k={k}: gap is not negative at lam={lo}")
    for _ in range(max_doublings):
        if f(hi) > 0:
            break
        hi *= 2
    else:
        raise NoSignChange(f"bracket failure for k={k}: gap never turns positive")
    return solve_monotone_root(f, lo, hi, rel_tol)


def solve_pk_level(k: int, level: float, rel_tol: float = 1e-12) -> float:
    """Rate at which ``p_k = h_k(k; lam)`` equals ``level`` (``r_k``: 1, ``t_k``: 2).

    ``p_k = sum_j C(k-1, j-1) lam^j / j! >= lam``, so the root lies in
    ``[0, level]``.
    """
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if not level > 0:
        raise ValueError(f"level must be > 0, got {level}")
    return solve_monotone_root(
        lambda lam: pmf_km_sum(Params(k, lam), k) - level, 0.0, float(level), rel_tol
    )


@dataclass(frozen=True)
class ThresholdSet:
    k: int
    r_k: float
    t_k: float
    lambda_k1k2: float
    bound_necessary: float
    bound_sufficient: float

    @property
    def difference(self) -> float:
        """``lambda_k1k2 - 9/(4k-1)``, distance above the sufficient bound."""
        return self.lambda_k1k2 - self.bound_sufficient

    @property
    def bounds_ordered(self) -> bool:
        return self.bound_sufficient < self.lambda_k1k2 < self.bound_necessary


def threshold_set(k: int, rel_tol: float = 1e-12) -> ThresholdSet:
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    return ThresholdSet(
        k=k,
        r_k=solve_pk_level(k, 1.0, rel_tol),
        t_k=solve_pk_level(k, 2.0, rel_tol),
        lambda_k1k2=solve_lambda_k1k2(k, rel_tol),
        bound_necessary=bound_necessary(k),
        bound_sufficient=bound_sufficient(k),
    )


def count_sign_changes(values) -> int:
    """Sign changes along ``values``, skipping exact zeros."""
    signs = np.sign(np.asarray(values, dtype=float))
    signs = signs[signs != 0]
    return int(np.count_nonzero(signs[1:] != signs[:-1]))


def verify_uniqueness(k: int, grid: int = 1000) -> bool:
    """Scan ``p_{k+2} - p_{k+1}`` on a log grid over ``(1e-6 B, 10 B]``, ``B = 4/(k+1)``.

    True iff exactly one sign change is seen. A pair of roots closer than
    the grid spacing would go unnoticed.
    """
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    if grid < 100:
        raise ValueError(f"grid must be >= 100, got {grid}")
    b = bound_necessary(k)
    lams = np.geomspace(1e-6 * b, 10 * b, grid)
    return count_sign_changes([gap_k1k2(k, lam) for lam in lams]) == 1
