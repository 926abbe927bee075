from __future__ import annotations

from fractions import Fraction
from itertools import combinations
from math import lcm

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nahmforge.series import (
    PuiseuxSeries,
    SeriesError,
    format_series,
    invert,
    monomial,
    pochhammer_finite,
    pochhammer_infinite,
    q_product,
    series_equal,
    sqrt,
)

THETA = 20


def poly(terms: dict, order) -> PuiseuxSeries:
    """Series from ``{exponent: coefficient}`` with rational exponents."""
    D = lcm(1, *(Fraction(e).denominator for e in terms))
    return PuiseuxSeries(D, {int(Fraction(e) * D): Fraction(c) for e, c in terms.items()}, order)


def partitions(n: int, parts) -> int:
    """Brute count of partitions of n into the given (repeatable) parts."""
    parts = sorted(set(parts), reverse=True)

    def go(rest: int, i: int) -> int:
        if rest == 0:
            return 1
        if i == len(parts):
            return 0
        return sum(go(rest - k * parts[i], i + 1) for k in range(rest // parts[i] + 1))

    return go(n, 0)


def distinct_partitions(n: int, parts) -> int:
    parts = [p for p in parts if p <= n]
    return sum(1 for k in range(len(parts) + 1) for c in combinations(parts, k) if sum(c) == n)


coeff = st.fractions(min_value=-5, max_value=5, max_denominator=4)


@st.composite
def sparse_series(draw, min_k: int = 0):
    D = draw(st.integers(1, 8))
    ks = draw(st.lists(st.integers(min_k, THETA * D - 1), max_size=6))
    return PuiseuxSeries(D, {k: draw(coeff) for k in ks}, THETA)


# -- ring axioms -------------------------------------------------------------------


@settings(max_examples=120, deadline=None)
@given(sparse_series(), sparse_series(), sparse_series())
def test_ring_axioms(a, b, c):
    assert series_equal(a + b, b + a)
    assert series_equal(a * b, b * a)
    assert series_equal((a + b) + c, a + (b + c))
    assert series_equal((a * b) * c, a * (b * c))
    assert series_equal(a * (b + c), a * b + a * c)
    assert series_equal(a - a, PuiseuxSeries.zero(THETA))


@settings(max_examples=100, deadline=None)
@given(sparse_series(), sparse_series(), st.fractions(min_value=1, max_value=THETA, max_denominator=6))
def test_truncation_coherence(a, b, cut):
    assert series_equal((a * b).truncate(cut), a.truncate(cut) * b.truncate(cut))
    assert (a * b).truncate(cut).order == cut


@settings(max_examples=60, deadline=None)
@given(sparse_series())
def test_invert_is_two_sided(a):
    a = a + PuiseuxSeries.one(THETA)  # unit constant term makes it invertible at every order
    if a.coeff(0) == 0:
        return
    inv = invert(a)
    one = PuiseuxSeries.one(THETA)
    assert series_equal(a * inv, one)
    assert series_equal(inv * a, one)


@settings(max_examples=40, deadline=None)
@given(sparse_series(min_k=1))
def test_sqrt_squares_back(a):
    s = sqrt(a + PuiseuxSeries.one(THETA))
    assert series_equal(s * s, a + PuiseuxSeries.one(THETA))


def test_rebase_preserves_value():
    a = poly({0: 1, Fraction(1, 2): -3, Fraction(7, 3): 2}, 10)
    assert a.rebase(a.D * 5) == a
    assert a.rebase(a.D * 5).reduced().D == a.D


# -- worked examples ----------------------------------------------------------------


def test_monomial_examples():
    assert monomial(0, 1, 10).terms() == [(0, 1)]
    assert monomial(Fraction(1, 2), 1, 5).terms() == [(Fraction(1, 2), 1)]
    eta41 = monomial(Fraction(-1, 24), 1, 3)
    assert eta41.D == 24 and eta41.terms() == [(Fraction(-1, 24), 1)]
    with pytest.raises(SeriesError):
        monomial(5, 1, 5)


def test_add_mul_examples():
    h = poly({0: 1, Fraction(1, 2): 1}, 10)
    assert series_equal(h * poly({0: 1, Fraction(1, 2): -1}, 10), poly({0: 1, 1: -1}, 10))
    assert series_equal(poly({0: 1, 1: -1}, 10) + poly({1: 1}, 10), PuiseuxSeries.one(10))


def test_product_with_geometric_series():
    # (1-q)(1-q^2) / (1-q) is exactly 1 - q^2
    left = poly({0: 1, 1: -1, 2: -1, 3: 1}, 4)
    geometric = poly({k: 1 for k in range(4)}, 4)
    assert (left * geometric).terms() == [(0, 1), (2, -1)]


def test_invert_examples():
    assert invert(poly({0: 1, 1: -1}, 6)).terms() == [(k, 1) for k in range(6)]
    assert invert(PuiseuxSeries.one(5)).terms() == [(0, 1)]
    inv = invert(poly({0: 1, 1: -1, 2: -1, 3: 1}, 5))
    assert [c for _, c in inv.terms()] == [partitions(n, [1, 2]) for n in range(5)]
    assert invert(monomial(Fraction(1, 3), 2, 5)).valuation() == Fraction(-1, 3)
    with pytest.raises(SeriesError):
        invert(PuiseuxSeries.zero(5))


def test_format_series():
    assert format_series(poly({0: 1, Fraction(1, 2): -1, 3: 2}, 5)) == "1 - q^(1/2) + 2*q^3 + O(q^5)"
    assert format_series(PuiseuxSeries.one(1), order_term=False) == "1"
    assert format_series(PuiseuxSeries.zero(3), order_term=False) == "0"


def test_json_round_trip():
    a = poly({Fraction(-1, 24): 3, 0: Fraction(-2, 7), Fraction(5, 8): 1}, Fraction(7, 2))
    data = a.to_json()
    assert data["D"] == 24 and data["order_num"] == 7 and data["order_den"] == 2
    assert PuiseuxSeries.from_json(data) == a


def test_series_equal_reports_first_mismatch():
    assert series_equal(poly({0: 1, 1: 1}, 5), poly({0: 1, 1: 1}, 5))
    cmp = series_equal(poly({0: 1, 1: 1}, 5), poly({0: 1, 1: -1}, 5))
    assert not cmp and cmp.exponent == 1 and (cmp.left, cmp.right) == (1, -1)
    # only exponents below the smaller order are compared
    assert series_equal(poly({0: 1, 3: 1}, 5), poly({0: 1}, 3))


# -- Pochhammer symbols -----------------------------------------------------------


def test_pochhammer_examples():
    assert pochhammer_finite(1, 1, 1, 0, 10).terms() == [(0, 1)]
    assert pochhammer_finite(1, 1, 1, 2, 10).terms() == [(0, 1), (1, -1), (2, -1), (3, 1)]
    assert pochhammer_finite(Fraction(1, 2), -1, 1, 1, 10).terms() == [(0, 1), (Fraction(1, 2), 1)]
    assert pochhammer_infinite(1, 1, 1, 8).terms() == [(0, 1), (1, -1), (2, -1), (5, 1), (7, 1)]
    assert pochhammer_infinite(100, 1, 1, 10).terms() == [(0, 1)]
    with pytest.raises(SeriesError):
        pochhammer_infinite(0, 1, 1, 10)


def test_distinct_odd_parts():
    s = pochhammer_infinite(1, -1, 2, 30)
    assert [s.coeff(n) for n in range(30)] == [distinct_partitions(n, range(1, 30, 2)) for n in range(30)]


def test_euler_function_inverse_counts_partitions():
    s = invert(pochhammer_infinite(1, 1, 1, 25))
    assert [s.coeff(n) for n in range(25)] == [partitions(n, range(1, 25)) for n in range(25)]


@pytest.mark.parametrize("e,s,t", [(1, 1, 1), (Fraction(1, 2), -1, 1), (Fraction(2, 3), 1, Fraction(1, 3)), (3, -1, 2)])
@pytest.mark.parametrize("n", [0, 1, 4, 10])
def test_pochhammer_telescoping(e, s, t, n):
    order = 40
    lhs = pochhammer_finite(e, s, t, n, order) * pochhammer_infinite(e + n * t, s, t, order)
    assert series_equal(lhs, pochhammer_infinite(e, s, t, order))


def test_q_product_matches_repeated_multiplication():
    factors = [(1, Fraction(1, 2), 2), (-1, Fraction(3), -1), (1, Fraction(5, 4), 1)]
    direct = PuiseuxSeries.one(20)
    for sign, e, power in factors:
        f = poly({0: 1, e: -sign}, 20)
        direct = direct * (f**power if power > 0 else invert(f) ** (-power))
    assert series_equal(q_product(factors, 20), direct)
