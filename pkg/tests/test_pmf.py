import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from poisson_order_k.pmf import (
    NormalizationError,
    OracleTooLarge,
    Params,
    count_compositions,
    normalization_check,
    pmf_bruteforce,
    pmf_k2_closed,
    pmf_km_sum,
    pmf_recurrence_table,
)

# Exact k=2, lam=1 values p_0..p_8 from [x^n] exp(x + x^2) (sympy series).
K2_LAM1 = [Fraction(1), Fraction(1), Fraction(3, 2), Fraction(7, 6), Fraction(25, 24),
           Fraction(27, 40), Fraction(331, 720), Fraction(1303, 5040), Fraction(1979, 13440)]


def rel(a, b, floor=1.0):
    return abs(a - b) / max(floor, abs(b))


class TestParams:
    def test_kappa(self):
        assert Params(4, 0.5).kappa() == 10

    @pytest.mark.parametrize("k, lam", [(0, 1.0), (-2, 1.0), (2, -0.1), (2, math.nan), (2, math.inf)])
    def test_rejects(self, k, lam):
        with pytest.raises(ValueError):
            Params(k, lam)

    def test_non_integer_k(self):
        with pytest.raises(TypeError):
            Params(2.5, 1.0)


class TestBruteforce:
    def test_n0(self):
        assert pmf_bruteforce(Params(2, 3.7), 0) == 1.0

    def test_k1_is_poisson(self):
        assert pmf_bruteforce(Params(1, 0.5), 3) == pytest.approx(0.5**3 / 6, rel=1e-15)

    def test_k2_lam1_n2(self):
        assert pmf_bruteforce(Params(2, 1.0), 2) == 1.5

    def test_k3_lam1_n4(self):
        # lam^4/4! + lam^3/2! + 3 lam^2/2 at lam = 1
        assert pmf_bruteforce(Params(3, 1.0), 4) == pytest.approx(49 / 24, rel=1e-15)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            pmf_bruteforce(Params(2, 1.0), -1)

    def test_budget(self):
        with pytest.raises(OracleTooLarge):
            pmf_bruteforce(Params(8, 1.0), 30, budget=100)

    @pytest.mark.parametrize("k, n, expected", [(1, 7, 1), (2, 4, 3), (3, 6, 7), (8, 5, 7), (30, 10, 42)])
    def test_composition_count(self, k, n, expected):
        # partitions of n into parts of size <= k
        assert count_compositions(k, n) == expected


class TestRecurrence:
    def test_base(self):
        t = pmf_recurrence_table(Params(3, 0.5), 0)
        assert list(t.values) == [1.0]

    def test_p1_is_lam(self):
        assert list(pmf_recurrence_table(Params(2, 1.0), 1).values) == [1.0, 1.0]

    def test_k2_lam1(self):
        t = pmf_recurrence_table(Params(2, 1.0), 8)
        for n, exact in enumerate(K2_LAM1):
            assert t[n] == pytest.approx(float(exact), rel=1e-15)

    def test_exact_table(self):
        t = pmf_recurrence_table(Params(2, 1.0), 8, exact=True)
        assert t.exact and t.method == "recurrence-exact"
        assert list(t.values) == K2_LAM1

    def test_lambda_zero(self):
        t = pmf_recurrence_table(Params(4, 0.0), 6)
        assert list(t.values) == [1.0, 0, 0, 0, 0, 0, 0]

    def test_read_only(self):
        t = pmf_recurrence_table(Params(2, 1.0), 4)
        with pytest.raises(ValueError):
            t.values[0] = 2.0

    def test_k_larger_than_table(self):
        t = pmf_recurrence_table(Params(50, 0.2), 10)
        # for n <= k the pmf does not depend on k
        u = pmf_recurrence_table(Params(10, 0.2), 10)
        np.testing.assert_allclose(t.values, u.values, rtol=1e-15)

    @pytest.mark.parametrize("lam", [0.1, 0.7, 3.0])
    def test_k1_reduction(self, lam):
        t = pmf_recurrence_table(Params(1, lam), 20)
        for n in range(21):
            assert rel(t[n], lam**n / math.factorial(n), floor=0) < 1e-13


class TestKmSum:
    def test_k2_n3(self):
        assert pmf_km_sum(Params(2, 1.0), 3) == pytest.approx(7 / 6, rel=1e-15)

    def test_k2_n6(self):
        # lam^3/3! + lam^4/(2!2!) + lam^5/4! + lam^6/6! at lam = 1
        assert pmf_km_sum(Params(2, 1.0), 6) == pytest.approx(331 / 720, rel=1e-14)

    def test_k5_matches_recurrence(self):
        p = Params(5, 0.3)
        # sympy: 0.015160099002910812821
        assert pmf_km_sum(p, 17) == pytest.approx(0.015160099002910812821, rel=1e-13)
        assert pmf_km_sum(p, 17) == pytest.approx(pmf_recurrence_table(p, 17)[17], rel=1e-13)

    def test_first_block_single_sum(self):
        # n <= k has no correction term and is independent of k
        assert pmf_km_sum(Params(9, 0.4), 6) == pmf_km_sum(Params(6, 0.4), 6)

    def test_negative_n(self):
        with pytest.raises(ValueError):
            pmf_km_sum(Params(2, 1.0), -3)


class TestK2Closed:
    def test_n8(self):
        assert pmf_k2_closed(1.0, 8) == pytest.approx(1979 / 13440, rel=1e-15)

    def test_p1(self):
        assert pmf_k2_closed(2.0, 1) == 2.0

    def test_matches_km(self):
        assert pmf_k2_closed(0.7, 5) == pytest.approx(pmf_km_sum(Params(2, 0.7), 5), rel=1e-14)
        assert pmf_k2_closed(0.7, 5) == pytest.approx(0.21291725, rel=1e-14)

    @pytest.mark.parametrize("lam", [0.1, 1.0, 2.0, 5.0])
    def test_agrees_with_km_to_30(self, lam):
        for n in range(31):
            a, b = pmf_k2_closed(lam, n), pmf_km_sum(Params(2, lam), n)
            assert rel(a, b, floor=0) < 1e-12, (lam, n)


LAMS = [0.1, 0.5, 1.0, 2.0]


@pytest.mark.parametrize("k", range(1, 7))
@pytest.mark.parametrize("lam", LAMS)
def test_three_methods_agree(k, lam):
    params = Params(k, lam)
    table = pmf_recurrence_table(params, 20)
    for n in range(21):
        r = table[n]
        assert abs(r - pmf_km_sum(params, n)) / max(1.0, r) < 1e-12
        assert abs(r - pmf_bruteforce(params, n)) / max(1.0, r) < 1e-10


@settings(max_examples=60, deadline=None)
@given(
    k=st.integers(1, 8),
    lam=st.floats(1e-3, 4.0),
    n=st.integers(0, 24),
)
def test_methods_agree_random(k, lam, n):
    params = Params(k, lam)
    r = pmf_recurrence_table(params, n)[n]
    assert abs(r - pmf_km_sum(params, n)) / max(1.0, r) < 1e-11
    assert abs(r - pmf_bruteforce(params, n)) / max(1.0, r) < 1e-10


@settings(max_examples=40, deadline=None)
@given(k=st.integers(1, 30), lam=st.floats(1e-3, 5.0))
def test_table_invariants(k, lam):
    t = pmf_recurrence_table(Params(k, lam), 3 * k + 5)
    v = np.asarray(t.values)
    assert v[0] == 1.0
    assert np.all(v >= 0)
    assert np.all(np.diff(v[1 : k + 1]) > 0)
    assert math.exp(-k * lam) * v.sum() <= 1 + 1e-12


class TestNormalization:
    def test_standard_poisson(self):
        N, defect = normalization_check(Params(1, 1.0), 1e-9)
        assert defect < 1e-9
        # P(X > 10) ~ 1.0e-8 and P(X > 11) ~ 8.3e-10 for Poisson(1)
        assert N == 11

    @pytest.mark.parametrize("k, lam, expected_n", [(2, 1.29, 28), (10, 0.3, 119), (3, 0.82, 38), (50, 0.05, 524)])
    def test_regression(self, k, lam, expected_n):
        N, defect = normalization_check(Params(k, lam), 1e-9)
        assert defect < 1e-9
        assert N == expected_n

    @pytest.mark.parametrize("k, lam", [(2, 1.29), (10, 0.3), (4, 2.0)])
    def test_smallest_and_monotone(self, k, lam):
        params = Params(k, lam)
        N, defect = normalization_check(params, 1e-9)
        mass = np.cumsum(pmf_recurrence_table(params, N).values) * math.exp(-k * lam)
        assert np.all(np.diff(mass) >= 0)
        assert 1 - mass[N - 1] >= 1e-9
        assert 1 - mass[N] == pytest.approx(defect, abs=1e-15)

    @pytest.mark.parametrize("k, lam", [(2, 1.29), (3, 0.82), (10, 0.3), (50, 0.05)])
    def test_mean(self, k, lam):
        params = Params(k, lam)
        N, _ = normalization_check(params, 1e-9)
        p = pmf_recurrence_table(params, N).values
        mean = math.fsum(n * v for n, v in enumerate(p)) * math.exp(-k * lam)
        assert mean == pytest.approx(params.kappa() * lam, rel=1e-8)

    def test_cap(self):
        with pytest.raises(NormalizationError):
            normalization_check(Params(3, 5.0), 1e-9, cap=10)

    def test_bad_tol(self):
        with pytest.raises(ValueError):
            normalization_check(Params(3, 1.0), 0.0)


@pytest.mark.parametrize("k", [2, 3, 5])
def test_lowest_power(k):
    # p_n ~ c lam^i for n in [(i-1)k+1, ik] as lam -> 0
    lam = 1e-6
    for i in (1, 2, 3):
        for n in range((i - 1) * k + 1, i * k + 1):
            ratio = pmf_recurrence_table(Params(k, lam), n)[n] / pmf_recurrence_table(Params(k, lam / 2), n)[n]
            assert ratio == pytest.approx(2.0**i, rel=1e-4), (k, i, n)
