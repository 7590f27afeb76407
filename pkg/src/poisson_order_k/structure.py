"""Monotone-decrease and concavity checks on the block [k+1, 2k] and the tail n >= k."""

from __future__ import annotations

from dataclasses import dataclass

from .pmf import Params, ScaledPmfTable, pmf_recurrence_table

__all__ = [
    "MARGINAL_REL",
    "StructureReport",
    "block_difference_kp1_2k",
    "block_second_difference",
    "structure_report",
    "default_cap",
]

# |p_{n+1} - p_n| below this fraction of p_n counts as a near-tie
MARGINAL_REL = 1e-13


def default_cap(k: int) -> int:
    return max(6 * k, 200)


def _lam_pow_over_fact(lam: float, j: int) -> float:
    term = 1.0
    for t in range(1, j + 1):
        term *= lam / t
    return term


def _shifted_binomial_sum(top: int, j_first: int, j_last: int, lam: float) -> float:
    """sum_{j=j_first..j_last} C(top, j - j_first) lam^j / j!"""
    if j_last < j_first:
        return 0.0
    term = _lam_pow_over_fact(lam, j_first)
    total = term
    for i in range(j_last - j_first):
        term *= (top - i) / (i + 1) * lam / (j_first + i + 1)
        total += term
    return total


def block_difference_kp1_2k(params: Params, n: int) -> float:
    """``p_n - p_{n-1}`` for ``n in [k+2, 2k]`` from the two-sum form

        sum_{j=2..n} C(n-2, j-2) lam^j / j!
          - lam * sum_{j=1..n-k-1} C(n-k-2, j-1) lam^j / j!
    """
    k, lam = params.k, params.lam
    if not k + 2 <= n <= 2 * k:
        raise ValueError(f"n must lie in [k+2, 2k] = [{k + 2}, {2 * k}], got {n}")
    positive = _shifted_binomial_sum(n - 2, 2, n, lam)
    negative = lam * _shifted_binomial_sum(n - k - 2, 1, n - k - 1, lam)
    return positive - negative


def block_second_difference(params: Params, n: int) -> float:
    """``p_n - 2 p_{n-1} + p_{n-2}`` for ``n in [k+3, 2k]`` from

        sum_{j=3..n} C(n-3, j-3) lam^j / j!
          - lam * sum_{j=2..n-k-1} C(n-k-3, j-2) lam^j / j!
    """
    k, lam = params.k, params.lam
    if not k + 3 <= n <= 2 * k:
        raise ValueError(f"n must lie in [k+3, 2k] = [{k + 3}, {2 * k}], got {n}")
    positive = _shifted_binomial_sum(n - 3, 3, n, lam)
    negative = lam * _shifted_binomial_sum(n - k - 3, 2, n - k - 1, lam)
    return positive - negative


@dataclass(frozen=True)
class StructureReport:
    """Shape of the scaled pmf beyond its first block.

    Attributes
    ----------
    decreasing_on_block
        ``p_k > p_{k+1} > ... > p_{2k}``.
    concave_on_block
        ``Delta_2(n) < 0`` for every ``n in [k+3, 2k]``.
    decreasing_tail_to
        Largest ``N <= cap`` with ``p`` strictly decreasing on ``[k, N]``.
    first_violation
        Smallest ``n >= k`` with ``p_{n+1} >= p_n``, or None up to ``cap``.
    marginal
        Every ``n`` in ``[k, cap)`` whose step is a near-tie.
    tightest
        ``(n, |p_{n+1} - p_n| / p_n)`` for the smallest relative step in
        ``[k, cap)``.
    """

    params: Params
    cap: int
    decreasing_on_block: bool
    concave_on_block: bool
    decreasing_tail_to: int
    first_violation: int | None
    marginal: tuple[int, ...]
    tightest: tuple[int, float]

    @property
    def decreasing_to_cap(self) -> bool:
        return self.first_violation is None


def _report_from_table(table: ScaledPmfTable, cap: int) -> StructureReport:
    k = table.params.k
    p = table.values
    steps = [(n, p[n + 1] - p[n]) for n in range(k, cap)]

    first_violation = next((n for n, d in steps if d >= 0), None)
    tail_to = cap if first_violation is None else first_violation
    marginal = tuple(n for n, d in steps if abs(d) < MARGINAL_REL * p[n])
    rel = [(n, abs(d) / p[n]) for n, d in steps]
    tightest = min(rel, key=lambda t: t[1])

    decreasing_on_block = all(d < 0 for n, d in steps if n < 2 * k)
    concave_on_block = all(
        p[n] - 2 * p[n - 1] + p[n - 2] < 0 for n in range(k + 3, 2 * k + 1)
    )
    return StructureReport(
        params=table.params,
        cap=cap,
        decreasing_on_block=decreasing_on_block,
        concave_on_block=concave_on_block,
        decreasing_tail_to=tail_to,
        first_violation=first_violation,
        marginal=marginal,
        tightest=(tightest[0], float(tightest[1])),
    )


def structure_report(params: Params, cap: int | None = None) -> StructureReport:
    """Tabulate ``p_0 .. p_cap`` by recurrence and classify its shape for n >= k.

    Inequalities are strict with no tolerance; near-ties are listed in
    ``marginal`` without changing the verdict.
    """
    k = params.k
    if k < 2:
        raise ValueError(f"k must be >= 2, got {k}")
    cap = default_cap(k) if cap is None else cap
    if cap < 2 * k:
        raise ValueError(f"cap must be >= 2k = {2 * k}, got {cap}")
    return _report_from_table(pmf_recurrence_table(params, cap), cap)
