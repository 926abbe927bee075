from __future__ import annotations

import cmath
import json
from fractions import Fraction
from itertools import product
from math import ceil, sqrt

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nahmforge.nahm import (
    FAMILIES,
    DescendingSumSpec,
    DomainError,
    NahmSpec,
    build_capparelli,
    build_family,
    build_sumC,
    build_wang,
    completed_square,
    eval_descending,
    eval_nahm,
    eval_nahm_numeric,
    parse_builtin,
    validate_symmetrizable,
)
from nahmforge.products import rhs_builder
from nahmforge.series import PuiseuxSeries, invert, pochhammer_finite, pochhammer_infinite, series_equal

F = Fraction


def brute_nahm(spec: NahmSpec, order) -> PuiseuxSeries:
    """Sum over a box large enough to hold every lattice point below ``order``."""
    M = np.array([[float(x) for x in row] for row in spec.AD])
    lam = float(np.linalg.eigvalsh(M).min())
    bnorm = sqrt(sum(float(x) ** 2 for x in spec.b))
    # lam/2 |n|^2 - |b| |n| >= order outside the box
    box = ceil((bnorm + sqrt(bnorm**2 + 2 * lam * float(order))) / lam) + 1
    total = PuiseuxSeries.zero(order)
    for n in product(range(box + 1), repeat=spec.r):
        e = spec.exponent(n)
        if e >= order:
            continue
        term = PuiseuxSeries.one(order - e)
        for ni, di in zip(n, spec.d):
            term = term * invert(pochhammer_finite(di, 1, di, ni, order - e))
        if spec.sign_coord is not None and n[spec.sign_coord - 1] % 2:
            term = -term
        total = total + term.shift(e)
    return total


# -- specs ------------------------------------------------------------------------------


def test_family_examples():
    s = build_family("T1.1-1", 2, 0)
    assert s.A == ((1, 1), (F(1, 2), 1))
    assert s.b == (0, 0) and s.c == F(-3, 56) and s.d == (2, 1)
    assert s.AD == ((2, 1), (1, 1))
    s = build_family("T1.2", 2, 2)
    assert s.b == (0, 0) and s.c == F(-3, 56)
    s = build_family("T1.1-2", 2, 0)
    assert s.b == (0, F(-1, 2)) and s.c == F(-1, 40)


def test_family_domain_errors():
    with pytest.raises(DomainError):
        build_family("T9", 2, 0)
    with pytest.raises(DomainError):
        build_family("T1.2", 1, 0)
    with pytest.raises(DomainError):
        build_family("T1.2", 3, 4)
    with pytest.raises(DomainError):
        build_sumC(2)


def test_capparelli_spec():
    s = build_capparelli()
    assert s.exponent((1, 0)) == 2 and s.exponent((0, 1)) == 6 and s.exponent((1, 1)) == 14
    assert validate_symmetrizable(s)


@pytest.mark.parametrize("family", FAMILIES)
@pytest.mark.parametrize("r", [2, 3, 4, 5, 6])
def test_families_are_symmetrizable(family, r):
    assert validate_symmetrizable(build_family(family, r, 0))


def test_indefinite_and_asymmetric_rejected():
    assert not validate_symmetrizable(NahmSpec.make([[1, 0], [0, -1]], [0, 0], 0, [1, 1]))
    assert not validate_symmetrizable(NahmSpec.make([[2, 1], [0, 2]], [0, 0], 0, [1, 1]))
    with pytest.raises(DomainError):
        eval_nahm(NahmSpec.make([[1, 0], [0, -1]], [0, 0], 0, [1, 1]), 5)


def test_sumC_shift():
    assert build_sumC(3)[2] == 0
    assert build_sumC(4)[2] == F(1, 2)


def test_parse_builtin_and_json():
    assert parse_builtin("capparelli") == build_capparelli()
    assert parse_builtin("T1.2:r=2:j=1") == build_family("T1.2", 2, 1)
    for bad in ("T1.2:r=2", "T1.2:r=x:j=1", "nope"):
        with pytest.raises(DomainError):
            parse_builtin(bad)
    spec = build_family("T1.3", 3, 2)
    assert NahmSpec.from_json(json.loads(json.dumps(spec.to_json()))) == spec
    with pytest.raises(DomainError):
        NahmSpec.from_json({"A": [[1]]})


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 6), st.data())
def test_completed_square_matches_matrix(r, data):
    n = data.draw(st.lists(st.integers(0, 12), min_size=r, max_size=r))
    for family in ("T1.1-1", "T1.1-2"):
        spec = build_family(family, r, 0)
        M = spec.AD
        quad = sum(M[i][k] * n[i] * n[k] for i in range(r) for k in range(r)) / 2
        assert completed_square(family, n) == quad


# -- exact expansion ---------------------------------------------------------------------

BRUTE_CASES = [
    (build_family("T1.1-1", 2, 0), 14),
    (build_family("T1.1-2", 2, 2), 14),
    (build_family("T1.2", 2, 1), 14),
    (build_family("T1.3", 2, 2), 14),
    (build_family("T1.3", 3, 1), 8),
    (build_family("T1.1-1", 3, 3), 8),
    (build_capparelli(), 20),
    (build_wang(2), 12),
    (build_wang(3, 2), 8),
]


@pytest.mark.parametrize("spec,order", BRUTE_CASES, ids=lambda x: getattr(x, "label", str(x)))
def test_matches_brute_force_box_sum(spec, order):
    assert series_equal(eval_nahm(spec, order), brute_nahm(spec, order))


@pytest.mark.parametrize("spec,order", BRUTE_CASES, ids=lambda x: getattr(x, "label", str(x)))
def test_pruning_sentinel(spec, order):
    assert series_equal(eval_nahm(spec, order), eval_nahm(spec, order, slack=2))


def test_only_zero_vector_below_smallest_exponent():
    spec = build_family("T1.2", 3, 3)
    smallest = min(spec.exponent(e) for e in ((1, 0, 0), (0, 1, 0), (0, 0, 1)))
    assert eval_nahm(spec, smallest).terms() == [(0, 1)]


def test_include_c_shifts_by_c():
    spec = build_family("T1.1-1", 2, 0)
    assert series_equal(eval_nahm(spec, 10, include_c=True), eval_nahm(spec, 10 - spec.c).shift(spec.c))


def test_capparelli_expansion():
    assert series_equal(eval_nahm(build_capparelli(), 13), rhs_builder("Capparelli", order=13))


def test_signed_family_at_j_equal_r():
    # the literal last entry b_r = -1 still gives the product side
    assert build_family("T1.3", 2, 2).b[-1] == -1
    assert series_equal(eval_nahm(build_family("T1.3", 2, 2), 10), rhs_builder("1.14", 2, 2, 10))


def test_descending_examples():
    assert eval_descending(DescendingSumSpec("2.1a", 2), F(1, 2)).terms() == [(0, 1)]
    expected = pochhammer_infinite(6, 1, 14, 12) * pochhammer_infinite(8, 1, 14, 12)
    expected = expected * pochhammer_infinite(14, 1, 14, 12) * invert(pochhammer_infinite(1, 1, 1, 12))
    assert series_equal(eval_descending(DescendingSumSpec("2.1a", 2), 12), expected)
    # (q^2j, q^(4r-2j-3), q^(4r-3); q^(4r-3)) at r=2, j=1
    expected = pochhammer_infinite(2, 1, 5, 12) * pochhammer_infinite(3, 1, 5, 12)
    expected = expected * pochhammer_infinite(5, 1, 5, 12) * invert(pochhammer_infinite(2, 1, 2, 12))
    assert series_equal(eval_descending(DescendingSumSpec("2.2b", 2, 1), 12), expected)
    with pytest.raises(DomainError):
        DescendingSumSpec("2.3a", 2)


# -- numeric evaluation ----------------------------------------------------------------


def test_numeric_trivial_point():
    spec = build_family("T1.2", 2, 2).with_(c=0)
    assert eval_nahm_numeric(spec, 0).value == 1


def test_numeric_capparelli_against_product():
    q = 0.1
    prod = 1.0
    for e in (2, 3, 4, 6):
        for k in range(60):
            prod *= 1 + q ** (e + 6 * k)
    got = eval_nahm_numeric(build_capparelli(), q, n_cap=30, include_c=False)
    assert abs(got.value - prod) < 1e-10


def test_numeric_matches_exact_coefficients():
    spec = build_family("T1.3", 3, 1)
    q = 0.2 + 0.15j
    exact = eval_nahm(spec, 60)
    series_value = sum(float(c) * cmath.exp(float(e) * cmath.log(q)) for e, c in exact.terms())
    got = eval_nahm_numeric(spec, q, include_c=False).value
    assert abs(got - series_value) < 1e-12


def test_numeric_domain_errors():
    spec = build_capparelli()
    with pytest.raises(DomainError):
        eval_nahm_numeric(spec, 1.0)
    with pytest.raises(DomainError):
        eval_nahm_numeric(spec, tau=-1j)
