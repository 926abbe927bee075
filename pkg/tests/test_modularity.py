from __future__ import annotations

from fractions import Fraction

import pytest

from nahmforge.modularity import (
    QUOTIENT_TAGS,
    THEOREMS,
    build_proof_quotients,
    crosscheck_quotient_vs_nahm,
    level_checks,
    pin_eta_convention,
    printed_orders,
    robins_analyze,
    theorem_data,
)
from nahmforge.nahm import DomainError
from nahmforge.products import EtaQuotientSpec, GenEtaSpec, eta_quotient

F = Fraction
RANKS = [2, 3, 4, 5]
LEVEL = {"4.1": lambda r: 128 * (4 * r - 1) ** 2, "4.2": lambda r: 128 * (4 * r - 1) ** 2}
LEVEL.update({"4.3": lambda r: 64 * (4 * r - 3) ** 2, "4.4": lambda r: 64 * (4 * r - 3) ** 2})


def _analyze(tag: str, r: int, j: int):
    data = theorem_data(tag.split("-")[0])
    return robins_analyze(build_proof_quotients(tag, r, j), data.N(r), strict=False)


def test_empty_quotient():
    rep = robins_analyze(EtaQuotientSpec(()), 12)
    assert (rep.w, rep.ord_inf, rep.ord_zero, rep.t, rep.N0) == (0, 0, 0, 1, 1)


def test_f1_at_rank_two():
    data = theorem_data("4.1")
    assert data.k0(2) == 3
    rep = robins_analyze(build_proof_quotients("4.1-f1", 2, 0), 28, strict=False)
    assert rep.w == 0 and rep.ord_zero == F(-3, 2)
    k = 3
    assert rep.ord_inf == F(64 * 4 - (64 * k + 36) * 2 + 16 * k * k + 16 * k + 5, 28)
    assert rep.accepts(56, 4)
    assert 56 * 4 * 28 == 6272


def test_strict_divisibility():
    spec = EtaQuotientSpec.of((3, 1, 1), (3, 0, -1))
    with pytest.raises(DomainError):
        robins_analyze(spec, 4)
    assert not robins_analyze(spec, 4, strict=False).divides


def test_nonzero_weight_reported_not_raised():
    assert robins_analyze(EtaQuotientSpec.of((2, 1, 1)), 2).modular
    rep = robins_analyze(EtaQuotientSpec.of((2, 0, 1)), 2)
    assert rep.w == 1 and not rep.modular


@pytest.mark.parametrize("theorem", THEOREMS)
@pytest.mark.parametrize("r", RANKS)
def test_levels_and_printed_orders(theorem, r):
    checks = level_checks(theorem, r)
    assert checks
    for c in checks:
        assert c.report.w == 0
        assert c.orders_match, (c.tag, r, c.j)
        assert c.ok, c.to_json()
        assert c.level == LEVEL[theorem](r)


@pytest.mark.parametrize("tag", QUOTIENT_TAGS)
@pytest.mark.parametrize("r", [2, 3, 4])
def test_orders_are_even_after_scaling(tag, r):
    for j in range(r + 1):
        rep = _analyze(tag, r, j)
        assert (rep.t * rep.ord_inf).denominator == 1 and (rep.t * rep.ord_inf) % 2 == 0
        assert (rep.N0 * rep.ord_zero).denominator == 1 and (rep.N0 * rep.ord_zero) % 2 == 0


@pytest.mark.parametrize("tag", QUOTIENT_TAGS)
def test_ord_inf_is_twice_the_expansion_valuation(tag):
    # independent of the closed forms: expand the quotient and read off its leading exponent
    for r in (2, 3):
        for j in range(r + 1):
            rep = _analyze(tag, r, j)
            assert rep.ord_inf == 2 * eta_quotient(build_proof_quotients(tag, r, j), 20).valuation()
            assert rep.ord_inf == printed_orders(tag, r, j)[0]


def test_invariant_under_permutation_and_merging():
    spec = build_proof_quotients("4.1-f2", 3, 1)
    rev = EtaQuotientSpec(tuple(reversed(spec.factors)))
    a, b = robins_analyze(spec, 44, strict=False), robins_analyze(rev, 44, strict=False)
    assert a == b
    g, x = spec.factors[0]
    split = EtaQuotientSpec(((g, x - 1), (g, F(1))) + spec.factors[1:])
    assert robins_analyze(split, 44, strict=False) == a


def test_quotient_shapes():
    f2 = build_proof_quotients("4.1-f2", 2, 1)
    deltas = {(s.delta, s.g) for s, _ in f2.factors}
    assert (F(14), F(2)) in deltas and (F(14), F(0)) in deltas
    assert dict(((s.delta, s.g), x) for s, x in f2.factors)[(F(14), F(0))] == F(3, 2)
    g = build_proof_quotients("4.2", 2, 0)
    shape = {(s.delta, s.g): x for s, x in g.factors}
    assert shape == {(F(7, 2), F(3)): 1, (F(7, 2), F(0)): F(1, 2), (F(2), F(1, 2)): -1, (F(2), F(0)): F(-1, 2)}
    h = build_proof_quotients("4.4", 2, 1)
    assert any(s.delta == F(5, 2) for s, _ in h.factors)


@pytest.mark.parametrize("theorem", THEOREMS)
@pytest.mark.parametrize("r", [2, 3])
def test_quotients_reproduce_nahm_sums(theorem, r):
    for j in range(r + 1):
        cmp = crosscheck_quotient_vs_nahm(theorem, r, j, 20)
        assert cmp, cmp.describe()


def test_once_convention_fails():
    assert pin_eta_convention(20) == {"once": False, "squared": True}
    assert not crosscheck_quotient_vs_nahm("4.1", 2, 0, 20, convention="once")


def test_gen_eta_spec_validation():
    with pytest.raises(DomainError):
        GenEtaSpec(4, 4)
    with pytest.raises(DomainError):
        theorem_data("4.9")
