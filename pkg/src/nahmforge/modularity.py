"""Robins' criterion for generalized eta-quotients and the level computations.

For ``f = prod eta_{delta,g}^{r_{delta,g}}`` with every ``delta | N``:

    w(f)        = sum_{delta} r_{delta,0}
    Ord_inf(f)  = sum delta P2(g/delta) r_{delta,g}
    Ord_0(f)    = sum (N/delta) P2(0) r_{delta,g}

If ``w = 0`` and ``t``, ``N0`` are least with ``t Ord_inf`` and ``N0 Ord_0``
even integers, then ``f(t tau)`` is a modular function on ``Gamma_1(t N0 N)``.
The formulas are applied verbatim to rational ``delta`` and ``g``.

Theorem selectors: ``4.1`` is the two-quotient form of the ``T1.1-1`` sums,
``4.2`` the one-quotient form of the ``T1.2`` sums, ``4.3`` the two-quotient
form of the ``T1.1-2`` sums and ``4.4`` the one-quotient form of the signed
``T1.3`` sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

from .nahm import DomainError, build_family, eval_nahm
from .products import ETA_CONVENTION, EtaQuotientSpec, eta_quotient, p2
from .series import Comparison, PuiseuxSeries, RationalLike, frac, series_equal

__all__ = [
    "QUOTIENT_TAGS",
    "THEOREMS",
    "RobinsReport",
    "TheoremData",
    "build_proof_quotients",
    "crosscheck_quotient_vs_nahm",
    "level_checks",
    "p2",
    "pin_eta_convention",
    "printed_orders",
    "quotient_sum",
    "robins_analyze",
    "theorem_data",
]

THEOREMS = ("4.1", "4.2", "4.3", "4.4")
QUOTIENT_TAGS = ("4.1-f1", "4.1-f2", "4.2", "4.3-g1", "4.3-g2", "4.4")


# -- Robins' criterion ---------------------------------------------------------------


def _least_even_multiplier(x: Fraction) -> int:
    """Least positive integer ``t`` with ``t x`` an even integer."""
    if x == 0:
        return 1
    return x.denominator * (1 if x.numerator % 2 == 0 else 2)


@dataclass(frozen=True)
class RobinsReport:
    w: Fraction
    ord_inf: Fraction
    ord_zero: Fraction
    t: int
    N0: int
    N: int
    divides: bool = True

    @property
    def level(self) -> int:
        return self.t * self.N0 * self.N

    @property
    def modular(self) -> bool:
        return self.w == 0

    def accepts(self, t: int, N0: int) -> bool:
        """Whether ``t Ord_inf`` and ``N0 Ord_0`` are even integers."""
        return t % self.t == 0 and N0 % self.N0 == 0

    def to_json(self) -> dict:
        def q(x: Fraction) -> str:
            return f"{x.numerator}/{x.denominator}"

        return {
            "w": q(self.w),
            "ord_inf": q(self.ord_inf),
            "ord_zero": q(self.ord_zero),
            "t": self.t,
            "N0": self.N0,
            "N": self.N,
            "level": self.level,
            "modular": self.modular,
        }


def robins_analyze(spec: EtaQuotientSpec, N: int, strict: bool = True) -> RobinsReport:
    """Exact weight, orders at the two cusps, and least ``t``, ``N0``.

    ``strict`` requires every ``N / delta`` to be an integer; with
    ``strict=False`` the formulas are evaluated anyway and the report records
    whether divisibility held.
    """
    if N < 1:
        raise DomainError(f"N must be positive, got {N}")
    divides = all((Fraction(N) / s.delta).denominator == 1 for s, _ in spec.factors)
    if strict and not divides:
        bad = sorted({str(s.delta) for s, _ in spec.factors if (Fraction(N) / s.delta).denominator != 1})
        raise DomainError(f"delta values {bad} do not divide N={N}")
    w = sum((x for s, x in spec.factors if s.g == 0), Fraction(0))
    ord_inf = sum((s.delta * p2(s.g / s.delta) * x for s, x in spec.factors), Fraction(0))
    ord_zero = sum((N / s.delta * p2(0) * x for s, x in spec.factors), Fraction(0))
    return RobinsReport(
        w, ord_inf, ord_zero, _least_even_multiplier(ord_inf), _least_even_multiplier(ord_zero), N, divides
    )


# -- the quotients of the four theorems ------------------------------------------------


@dataclass(frozen=True)
class TheoremData:
    """Closed-form constants of one theorem: family, ``N``, ``t``, ``N0`` and level."""

    theorem: str
    family: str
    quotients: tuple[str, ...]
    N: Callable[[int], int]
    t: Callable[[int], int]
    N0: int
    level: Callable[[int], int]
    k0: Callable[[int], int]


_THEOREMS = {
    "4.1": TheoremData(
        "4.1", "T1.1-1", ("4.1-f1", "4.1-f2"),
        lambda r: 16 * r - 4, lambda r: 32 * r - 8, 4, lambda r: 128 * (4 * r - 1) ** 2, lambda r: 2 * r - 1,
    ),
    "4.2": TheoremData(
        "4.2", "T1.2", ("4.2",),
        lambda r: 4 * r - 1, lambda r: 32 * r - 8, 16, lambda r: 128 * (4 * r - 1) ** 2, lambda r: 2 * r - 1,
    ),
    "4.3": TheoremData(
        "4.3", "T1.1-2", ("4.3-g1", "4.3-g2"),
        lambda r: 16 * r - 12, lambda r: 32 * r - 24, 2, lambda r: 64 * (4 * r - 3) ** 2, lambda r: 2 * r - 2,
    ),
    "4.4": TheoremData(
        "4.4", "T1.3", ("4.4",),
        lambda r: 4 * r - 3, lambda r: 16 * r - 12, 16, lambda r: 64 * (4 * r - 3) ** 2, lambda r: 2 * r - 2,
    ),
}


def theorem_data(theorem: str) -> TheoremData:
    try:
        return _THEOREMS[theorem]
    except KeyError:
        raise DomainError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}") from None


def _theorem_of(tag: str) -> TheoremData:
    if tag not in QUOTIENT_TAGS:
        raise DomainError(f"unknown quotient {tag!r}; expected one of {QUOTIENT_TAGS}")
    return _THEOREMS[tag.split("-")[0]]


def _k(data: TheoremData, r: int, j: int) -> int:
    if r < 2 or not 0 <= j <= r:
        raise DomainError(f"need r >= 2 and 0 <= j <= r, got r={r}, j={j}")
    return data.k0(r) if j == 0 else j


def _eta(delta: RationalLike, g: RationalLike, x: RationalLike) -> tuple[Fraction, Fraction, Fraction]:
    """A factor with ``g`` reduced to ``[0, delta)`` (``eta_{delta,g}`` only sees ``+-g mod delta``)."""
    delta, g = frac(delta), frac(g)
    g = g - delta * (g // delta)
    return delta, g, frac(x)


def build_proof_quotients(tag: str, r: int, j: int) -> EtaQuotientSpec:
    """Factor list of one of the eta-quotients representing the rank-r sums."""
    data = _theorem_of(tag)
    k = _k(data, r, j)
    h = Fraction(1, 2)
    if tag == "4.1-f1":
        M = 16 * r - 4
        items = [_eta(M, 4 * k, 1), _eta(M, 0, h), _eta(4, 1, -1), _eta(4, 0, -h)]
    elif tag == "4.1-f2":
        M, L = 16 * r - 4, 8 * r - 2
        items = [
            _eta(L, 2 * k, 1), _eta(M, 8 * r - 4 * k - 2, 1), _eta(L, 0, 3 * h),
            _eta(L, 4 * r - 2 * k - 1, -1), _eta(4, 2, -1), _eta(4, 0, -h), _eta(4 * r - 1, 0, -h), _eta(M, 0, -h),
        ]
    elif tag == "4.3-g1":
        M = 16 * r - 12
        items = [_eta(M, 4 * k, 1), _eta(M, 0, h), _eta(4, 1, -1), _eta(4, 0, -h)]
    elif tag == "4.3-g2":
        M, L = 16 * r - 12, 8 * r - 6
        items = [
            _eta(L, 2 * k, 1), _eta(M, 8 * r - 4 * k - 6, 1), _eta(L, 0, 3 * h),
            _eta(L, 4 * r - 2 * k - 3, -1), _eta(4, 2, -1), _eta(4, 0, -h), _eta(4 * r - 3, 0, -h), _eta(M, 0, -h),
        ]
    else:
        delta = 2 * r - h if tag == "4.2" else 2 * r - 3 * h
        items = [_eta(delta, k, 1), _eta(delta, 0, h), _eta(2, h, -1), _eta(2, 0, -h)]
    return EtaQuotientSpec.of(*items)


def printed_orders(tag: str, r: int, j: int) -> tuple[Fraction, Fraction]:
    """Closed forms ``(Ord_inf, Ord_0)`` stated alongside each quotient."""
    data = _theorem_of(tag)
    k = _k(data, r, j)
    F = Fraction
    if tag == "4.1-f1":
        return F(64 * r * r - (64 * k + 36) * r + 16 * k * k + 16 * k + 5, 16 * r - 4), F(1, 2) - r
    if tag == "4.1-f2":
        return F((4 * r - 4 * k - 1) ** 2, 16 * r - 4), F(1, 2) - r
    if tag == "4.3-g1":
        return F(64 * r * r - (64 * k + 100) * r + 16 * k * k + 48 * k + 39, 4 * (4 * r - 3)), F(1 - r)
    if tag == "4.3-g2":
        return F((4 * r - 4 * k - 3) ** 2, 4 * (4 * r - 3)), F(1 - r)
    if tag == "4.2":
        return F(8 * r * r - 2 * (8 * k + 3) * r + 8 * k * k + 4 * k + 1, 16 * r - 4), F(5 - 4 * r, 8)
    return F(4 * r * r - (8 * k + 7) * r + 4 * k * k + 6 * k + 3, 8 * r - 6), F(7 - 4 * r, 8)


@dataclass(frozen=True)
class LevelCheck:
    """One quotient of one theorem at one ``(r, j)``, against its closed-form constants."""

    tag: str
    r: int
    j: int
    report: RobinsReport
    printed_ord_inf: Fraction
    printed_ord_zero: Fraction
    printed_t: int
    printed_N0: int
    printed_level: int

    @property
    def orders_match(self) -> bool:
        return (self.report.ord_inf, self.report.ord_zero) == (self.printed_ord_inf, self.printed_ord_zero)

    @property
    def level(self) -> int:
        """Level obtained with the closed-form ``t`` and ``N0``."""
        return self.printed_t * self.printed_N0 * self.report.N

    @property
    def ok(self) -> bool:
        return (
            self.report.modular
            and self.orders_match
            and self.report.accepts(self.printed_t, self.printed_N0)
            and self.level == self.printed_level
        )

    def to_json(self) -> dict:
        return {
            "quotient": self.tag,
            "r": self.r,
            "j": self.j,
            "robins": self.report.to_json(),
            "printed": {"t": self.printed_t, "N0": self.printed_N0, "level": self.printed_level},
            "level": self.level,
            "orders_match": self.orders_match,
            "ok": self.ok,
        }


def level_checks(theorem: str, r: int) -> list[LevelCheck]:
    """Robins analysis of every quotient of ``theorem`` for ``0 <= j <= r``."""
    data = theorem_data(theorem)
    out = []
    for j in range(r + 1):
        for tag in data.quotients:
            spec = build_proof_quotients(tag, r, j)
            report = robins_analyze(spec, data.N(r), strict=False)
            oi, oz = printed_orders(tag, r, j)
            out.append(LevelCheck(tag, r, j, report, oi, oz, data.t(r), data.N0, data.level(r)))
    return out


# -- series cross-check ----------------------------------------------------------------


def quotient_sum(theorem: str, r: int, j: int, order: RationalLike, convention: str = ETA_CONVENTION) -> PuiseuxSeries:
    data = theorem_data(theorem)
    order = frac(order)
    total = PuiseuxSeries.zero(order)
    for tag in data.quotients:
        total = total + eta_quotient(build_proof_quotients(tag, r, j), order, convention)
    return total


def crosscheck_quotient_vs_nahm(
    theorem: str, r: int, j: int, order: RationalLike = 20, convention: str = ETA_CONVENTION
) -> Comparison:
    """The Nahm sum with its ``q^c`` factor against the sum of the theorem's quotients."""
    data = theorem_data(theorem)
    order = frac(order)
    spec = build_family(data.family, r, j)
    return series_equal(eval_nahm(spec, order, include_c=True), quotient_sum(theorem, r, j, order, convention))


def pin_eta_convention(order: RationalLike = 20) -> dict[str, bool]:
    """Which ``eta_{delta,0}`` reading makes the rank-2 quotients reproduce the sums."""
    result = {}
    for convention in ("once", "squared"):
        result[convention] = all(
            crosscheck_quotient_vs_nahm(th, 2, j, order, convention) for th in THEOREMS for j in range(3)
        )
    return result

