"""Backward finite differences of the scaled pmf and their closed form on [1, k]."""

from __future__ import annotations

from dataclasses import dataclass

from .pmf import Params, ScaledPmfTable, pmf_recurrence_table

__all__ = [
    "DifferenceTable",
    "MonotonicityCell",
    "MonotonicityReport",
    "difference",
    "difference_table",
    "difference_closed_form",
    "absolute_monotonicity_report",
    "increasing_on_first_block",
]


@dataclass(frozen=True)
class DifferenceTable:
    """``Delta_m(n)`` for ``n`` in ``n_start .. n_start + len(values) - 1``."""

    params: Params
    m: int
    n_start: int
    values: tuple[float, ...]

    def __getitem__(self, n: int) -> float:
        i = n - self.n_start
        if not 0 <= i < len(self.values):
            raise IndexError(f"Delta_{self.m}({n}) not in table")
        return self.values[i]

    @property
    def ns(self) -> range:
        return range(self.n_start, self.n_start + len(self.values))


def difference(table: ScaledPmfTable, m: int, n: int) -> float:
    """m-th backward difference ``Delta_m(n) = sum_j C(m, j) (-1)^j p_{n-j}``.

    The sign is fixed so that ``Delta_1(n) = p_n - p_{n-1}`` and
    ``Delta_2(n) = p_n - 2 p_{n-1} + p_{n-2}``; equivalently
    ``Delta_m(n) = Delta_{m-1}(n) - Delta_{m-1}(n-1)`` with ``Delta_0 = p``.

    On an exact table the sum is formed in rational arithmetic and rounded
    once at the end. On a float table, expect absolute error of order
    ``2**m * eps * max(p)``.
    """
    if m < 0:
        raise ValueError(f"m must be >= 0, got {m}")
    if n < m:
        raise ValueError(f"need n >= m, got n={n}, m={m}")
    if n > table.n_max:
        raise ValueError(f"table covers n <= {table.n_max}, asked for n={n}")
    p = table.values
    coeff = 1
    acc = 0
    for j in range(m + 1):
        acc += coeff * p[n - j] if j % 2 == 0 else -coeff * p[n - j]
        coeff = coeff * (m - j) // (j + 1)
    return float(acc)


def difference_table(table: ScaledPmfTable, m: int, n_lo: int | None = None,
                     n_hi: int | None = None) -> DifferenceTable:
    n_lo = m if n_lo is None else max(n_lo, m)
    n_hi = table.n_max if n_hi is None else n_hi
    vals = tuple(difference(table, m, n) for n in range(n_lo, n_hi + 1))
    return DifferenceTable(table.params, m, n_lo, vals)


def difference_closed_form(params: Params, m: int, n: int) -> float:
    """``Delta_m(n) = sum_{j=m+1..n} C(n-m-1, j-m-1) lam^j / j!``.

    Only valid for ``1 <= m <= k-1`` and ``m+1 <= n <= k``; there every term
    is positive, so the result is strictly positive for ``lam > 0``.
    """
    k, lam = params.k, params.lam
    if not (1 <= m <= k - 1 and m + 1 <= n <= k):
        raise ValueError(
            f"closed form needs 1 <= m <= k-1 and m+1 <= n <= k (k={k}, m={m}, n={n})"
        )
    # lam^(m+1) / (m+1)! without forming the power and factorial separately
    term = 1.0
    for t in range(1, m + 2):
        term *= lam / t
    top = n - m - 1
    total = term
    for i in range(top):
        # i -> i+1 on C(top, i) and on lam^j / j! with j = m+1+i
        term *= (top - i) / (i + 1) * lam / (m + 2 + i)
        total += term
    return total


@dataclass(frozen=True)
class MonotonicityCell:
    m: int
    n: int
    delta_recursive: float
    delta_closed: float

    @property
    def rel_err(self) -> float:
        return abs(self.delta_recursive - self.delta_closed) / abs(self.delta_closed)


@dataclass(frozen=True)
class MonotonicityReport:
    params: Params
    cells: tuple[MonotonicityCell, ...]

    @property
    def max_rel_err(self) -> float:
        return max(c.rel_err for c in self.cells)

    @property
    def all_positive(self) -> bool:
        return all(c.delta_recursive > 0 and c.delta_closed > 0 for c in self.cells)


def absolute_monotonicity_report(params: Params) -> MonotonicityReport:
    """Check every ``Delta_m(n) > 0`` for ``m in [1, k-1]``, ``n in [m+1, k]``.

    Each cell is evaluated twice: from the binomial stencil applied to an
    exact recurrence table, and from the closed-form positive sum. High
    orders cancel almost completely (``Delta_{k-1}(k) = lam^k / k!`` next to
    ``p_k`` of order ``lam``), hence the exact table.
    """
    k = params.k
    if k < 2:
        raise ValueError("k must be >= 2 for the window [1, k] to hold any difference")
    table = pmf_recurrence_table(params, k, exact=True)
    cells = []
    for m in range(1, k):
        for n in range(m + 1, k + 1):
            cells.append(MonotonicityCell(
                m, n, difference(table, m, n), difference_closed_form(params, m, n)
            ))
    return MonotonicityReport(params, tuple(cells))


def increasing_on_first_block(table: ScaledPmfTable) -> bool:
    """True iff ``p_1 < p_2 < ... < p_k`` holds strictly in ``table``."""
    k = table.params.k
    if table.n_max < k:
        raise ValueError(f"table must cover n <= k={k}")
    p = table.values
    return all(p[n] > p[n - 1] for n in range(2, k + 1))
