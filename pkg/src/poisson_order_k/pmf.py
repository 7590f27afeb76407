"""
Scaled probability mass function of the Poisson distribution of order k.

Everything here works with the scaled pmf

    p_n = h_k(n; lam) = exp(k * lam) * f_k(n; lam),

which is a polynomial in ``lam`` with nonnegative coefficients. Three
independent evaluators are provided:

* :func:`pmf_bruteforce` sums over all compositions
  ``n_1 + 2 n_2 + ... + k n_k = n`` (the defining formula, used as an oracle);
* :func:`pmf_recurrence_table` runs the order-k compound Poisson recurrence;
* :func:`pmf_km_sum` evaluates closed combinatorial sums (two nested binomial sums).

:func:`pmf_k2_closed` is an extra closed form valid only for k = 2.
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

__all__ = [
    "Params",
    "ScaledPmfTable",
    "OracleTooLarge",
    "NormalizationError",
    "pmf_bruteforce",
    "pmf_recurrence_table",
    "pmf_km_sum",
    "pmf_k2_closed",
    "normalization_check",
    "count_compositions",
]

DEFAULT_ENUMERATION_BUDGET = 10**7
DEFAULT_NORMALIZATION_CAP = 10**5


class OracleTooLarge(ValueError):
    """The brute-force enumeration would exceed its tuple budget."""


class NormalizationError(ArithmeticError):
    """The truncated pmf sum did not reach the tolerance below the cap."""


@dataclass(frozen=True)
class Params:
    """Order ``k`` and rate ``lam`` of the distribution.

    ``lam = 0`` is accepted and yields the degenerate pmf (``p_0 = 1``, all
    other entries zero); the threshold solvers reject it separately.
    """

    k: int
    lam: float

    def __post_init__(self):
        if isinstance(self.k, bool) or int(self.k) != self.k:
            raise TypeError(f"k must be an integer, got {self.k!r}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if not math.isfinite(self.lam) or self.lam < 0:
            raise ValueError(f"lam must be finite and >= 0, got {self.lam}")
        object.__setattr__(self, "k", int(self.k))
        object.__setattr__(self, "lam", float(self.lam))

    def kappa(self) -> float:
        """Mean of the distribution divided by ``lam``, i.e. k(k+1)/2."""
        return self.k * (self.k + 1) / 2


@dataclass(frozen=True)
class ScaledPmfTable:
    """Values ``p_0 .. p_N`` of the scaled pmf for one ``Params``.

    ``values`` is a read-only float array, or a tuple of ``Fraction`` when the
    table was built exactly (``method`` ends in ``-exact``).
    """

    params: Params
    values: np.ndarray | tuple[Fraction, ...] = field(repr=False)
    method: str = "recurrence"

    def __len__(self) -> int:
        return len(self.values)

    def __getitem__(self, n):
        return self.values[n]

    @property
    def n_max(self) -> int:
        return len(self.values) - 1

    @property
    def exact(self) -> bool:
        return isinstance(self.values, tuple)

    def as_array(self) -> np.ndarray:
        if self.exact:
            return np.array([float(v) for v in self.values])
        return self.values


def _check_n(n: int) -> None:
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")


def count_compositions(k: int, n: int) -> int:
    """Number of tuples (n_1..n_k) >= 0 with n_1 + 2 n_2 + ... + k n_k = n."""
    ways = [1] + [0] * n
    for part in range(1, min(k, n) + 1):
        for total in range(part, n + 1):
            ways[total] += ways[total - part]
    return ways[n]


def pmf_bruteforce(params: Params, n: int, budget: int = DEFAULT_ENUMERATION_BUDGET) -> float:
    """Scaled pmf by direct enumeration of the defining composition sum.

    Every nonnegative tuple ``(n_1, ..., n_k)`` with ``sum(i * n_i) = n``
    contributes ``lam**(n_1 + ... + n_k) / (n_1! ... n_k!)``. Cost grows like
    the partition count of ``n``, so this is only meant as an oracle for
    small instances.

    Raises
    ------
    OracleTooLarge
        If the number of tuples exceeds ``budget``.
    """
    _check_n(n)
    k, lam = params.k, params.lam
    count = count_compositions(k, n)
    if count > budget:
        raise OracleTooLarge(
            f"{count} compositions for k={k}, n={n} exceed the budget of {budget}"
        )

    terms: list[float] = []
    top = min(k, n)  # parts larger than n must have multiplicity zero

    def walk(part: int, remaining: int, total: int, denom: int) -> None:
        if part == 1:
            # n_1 is forced
            total += remaining
            denom *= math.factorial(remaining)
            terms.append(lam**total / denom)
            return
        for mult in range(remaining // part + 1):
            walk(
                part - 1,
                remaining - mult * part,
                total + mult,
                denom * math.factorial(mult),
            )

    if n == 0:
        return 1.0
    walk(top, n, 0, 1)
    return math.fsum(terms)


def pmf_recurrence_table(params: Params, n_max: int, exact: bool = False) -> ScaledPmfTable:
    """Tabulate ``p_0 .. p_{n_max}`` with the recurrence

        p_n = (lam / n) * sum_{j=1..k} j * p_{n-j},   p_0 = 1,

    where entries with a negative index are zero. With ``exact=True`` the
    recurrence runs in rational arithmetic on the exact binary value of
    ``lam``; this is slow but free of rounding, which high-order finite
    differences need.
    """
    _check_n(n_max)
    k, lam = params.k, params.lam
    if exact:
        lam_q = Fraction(lam)
        vals = [Fraction(1)]
        for n in range(1, n_max + 1):
            acc = sum(j * vals[n - j] for j in range(1, min(k, n) + 1))
            vals.append(lam_q * acc / n)
        return ScaledPmfTable(params, tuple(vals), "recurrence-exact")

    p = np.zeros(n_max + 1)
    p[0] = 1.0
    # n <= k: no truncation, so S_n = sum_{j<=n} j p_{n-j} obeys
    # S_{n+1} = S_n + (p_0 + ... + p_n); only additions of positive terms
    weighted, running = 1.0, 1.0
    head = min(k, n_max)
    for n in range(1, head + 1):
        pn = lam / n * weighted
        p[n] = pn
        running += pn
        weighted += running
    weights = np.arange(1.0, k + 1.0)
    for n in range(head + 1, n_max + 1):
        lo = max(0, n - k)
        # p[n-1], p[n-2], ..., p[lo] paired with weights 1, 2, ...
        p[n] = lam / n * np.dot(weights[: n - lo], p[n - 1 : lo - 1 if lo else None : -1])
    p.setflags(write=False)
    return ScaledPmfTable(params, p, "recurrence")


@functools.lru_cache(maxsize=4096)
def _km_coefficients(k: int, n: int) -> tuple[float, ...]:
    """Coefficients c_1..c_n of ``p_n = sum_s c_s lam^s`` for ``n > k``.

    Each binomial sum of the combinatorial formula is regrouped by power of
    ``lam`` and accumulated exactly. The alternating correction cancels
    much of the main sum, so evaluating it term by term in floating point
    loses all accuracy once ``n`` is a few multiples of ``k + 1``; the
    regrouped coefficients are nonnegative and evaluate stably.
    """
    fact = [1]
    for t in range(1, n + 1):
        fact.append(fact[-1] * t)
    coeff = [Fraction(0)] * (n + 1)
    for s in range(1, n + 1):
        coeff[s] += Fraction(math.comb(n - 1, s - 1), fact[s])
    for i in range(1, n // (k + 1) + 1):
        rest = n - i * (k + 1)
        sign = 1 if i % 2 == 1 else -1
        for j in range(rest + 1):
            # (lam^i / i!) * C(rest + i - 1, j + i - 1) lam^j / j!
            coeff[i + j] -= sign * Fraction(math.comb(rest + i - 1, j + i - 1), fact[i] * fact[j])
    if any(c < 0 for c in coeff):
        raise ArithmeticError(f"negative coefficient in p_{n} for k={k}")
    return tuple(float(c) for c in coeff[1:])


def pmf_km_sum(params: Params, n: int) -> float:
    """Scaled pmf from the closed combinatorial sums.

    Write ``n = l (k+1) + m`` with ``0 <= m <= k``. Then

        p_n = sum_{j=1..n} C(n-1, j-1) lam^j / j!
              - sum_{i=1..l} (-1)^(i-1) (lam^i / i!)
                  * sum_{j=0..n-i(k+1)} C(n - i(k+1) + i - 1, j + i - 1) lam^j / j!

    and for ``l = 0`` (that is ``n <= k``) the correction vanishes. That
    branch is summed directly with running-ratio terms; for ``l >= 1`` the
    sums are first collected per power of ``lam`` (see ``_km_coefficients``).
    """
    _check_n(n)
    if n == 0:
        return 1.0
    k, lam = params.k, params.lam
    if n > k:
        acc = 0.0
        for c in reversed(_km_coefficients(k, n)):
            acc = acc * lam + c
        return acc * lam

    # C(n-1, j-1) lam^j / j!, stepping j -> j+1 by (n-j)/j * lam/(j+1)
    term = lam
    total = term
    for j in range(1, n):
        term *= (n - j) / j * lam / (j + 1)
        total += term
    return total


def pmf_k2_closed(lam: float, n: int) -> float:
    """Scaled pmf for k = 2: sum_{j=0..n//2} lam^(n-j) / ((n-2j)! j!)."""
    _check_n(n)
    if lam < 0 or not math.isfinite(lam):
        raise ValueError(f"lam must be finite and >= 0, got {lam}")
    if lam == 0:
        return 1.0 if n == 0 else 0.0
    # j = n//2 term first, then walk j downwards: ratio is lam*j/((n-2j+2)(n-2j+1))
    j = n // 2
    term = 1.0
    for t in range(1, n - 2 * j + 1):
        term *= lam / t
    for t in range(1, j + 1):
        term *= lam / t
    total = term
    while j > 0:
        term *= lam * j / ((n - 2 * j + 2) * (n - 2 * j + 1))
        j -= 1
        total += term
    return total


def normalization_check(
    params: Params,
    tol: float = 1e-9,
    cap: int = DEFAULT_NORMALIZATION_CAP,
) -> tuple[int, float]:
    """Smallest ``N`` with ``1 - exp(-k lam) * sum_{n<=N} p_n < tol``.

    Returns ``(N, defect)``. The table is grown in doubling chunks, so the
    work is proportional to the returned ``N``.
    """
    if not tol > 0:
        raise ValueError(f"tol must be > 0, got {tol}")
    scale = math.exp(-params.k * params.lam)
    n_max = 32
    while True:
        n_max = min(n_max, cap)
        table = pmf_recurrence_table(params, n_max)
        mass = np.cumsum(table.values) * scale
        defect = 1.0 - mass
        hit = np.flatnonzero(defect < tol)
        if hit.size:
            N = int(hit[0])
            return N, float(defect[N])
        if not np.all(np.isfinite(mass)):
            raise NormalizationError(f"non-finite pmf values for {params}")
        if n_max >= cap:
            raise NormalizationError(
                f"defect {defect[-1]:.3e} still above tol={tol} at N={cap} for {params}"
            )
        n_max *= 2

