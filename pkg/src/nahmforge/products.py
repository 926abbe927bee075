"""Product-side series: triple products, theta series, generalized eta quotients.

Everything here is assembled from binomial factors ``(1 - s q^e)`` and
expanded by :func:`nahmforge.series.q_product`.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from math import ceil, floor, gcd, isqrt
from typing import Iterable

from .series import (
    PuiseuxSeries,
    RationalLike,
    SeriesError,
    frac,
    pochhammer_factors,
    q_product,
    sqrt,
)
from .nahm import DomainError

Factor = tuple[int, Fraction, int]


# -- factor helpers ---------------------------------------------------------------


def _inf(e: RationalLike, step: RationalLike, order: Fraction, sign: int = 1, alt: bool = False, power: int = 1):
    """Factors of ``(s q^e; q^step)_inf`` (``alt``: base ``-q^step``), allowing ``e <= 0``.

    Factors with nonpositive exponent are finite in number; they are kept and
    the cutoff is raised by their total negative exponent so the final shift
    leaves the requested order intact.
    """
    e, step = frac(e), frac(step)
    if step <= 0:
        raise SeriesError("product step must be positive")
    neg = Fraction(0)
    k = 0
    while e + k * step < 0:
        neg += (e + k * step) * abs(power)
        k += 1
    cutoff = order - neg
    out: list[Factor] = []
    k = 0
    while e + k * step < cutoff:
        s = sign * (-1 if alt and k % 2 else 1)
        out.append((s, e + k * step, power))
        k += 1
    return out


def _quot(order: Fraction, num: Iterable[tuple], den: Iterable[tuple] = (), shift: RationalLike = 0) -> PuiseuxSeries:
    """``q^shift prod(num) / prod(den)``; entries are ``(e, step[, sign[, alternating]])``."""
    shift = frac(shift)
    inner = order - shift
    if inner <= 0:
        return PuiseuxSeries.zero(order)
    factors: list[Factor] = []
    for items, power in ((num, 1), (den, -1)):
        for item in items:
            e, step, sign, alt = (tuple(item) + (1, False)[len(item) - 2 :])[:4]
            factors += _inf(e, step, inner, sign, alt, power)
    return q_product(factors, inner).shift(shift)


# -- Jacobi triple product -------------------------------------------------------


def jacobi_triple_sum(z_exp: RationalLike, z_sign: int, modulus: RationalLike, order: RationalLike) -> PuiseuxSeries:
    """``sum_n (-1)^n q^(n^2 m / 2) z^n`` with ``z = z_sign q^z_exp``."""
    z_exp, modulus, order = frac(z_exp), frac(modulus), frac(order)
    if modulus <= 0:
        raise DomainError("modulus must be positive")
    h = modulus / 2
    # exponent h n^2 + z_exp n is minimal near n = -z_exp / (2h)
    center = -z_exp / (2 * h)
    terms: dict[Fraction, int] = defaultdict(int)
    radius = isqrt(int(ceil(abs(order) / h + center * center)) + 1) + 2
    lo, hi = floor(center) - radius, ceil(center) + radius
    for n in range(lo, hi + 1):
        e = h * n * n + z_exp * n
        if e < order:
            terms[e] += (-1) ** (n % 2) * (z_sign ** (n % 2))
    D = 1
    for e in terms:
        D = D * e.denominator // gcd(D, e.denominator)
    return PuiseuxSeries(D, {int(e * D): c for e, c in terms.items()}, order)


def jacobi_triple_product(z_exp: RationalLike, z_sign: int, modulus: RationalLike, order: RationalLike) -> PuiseuxSeries:
    """``(q^m, z q^(m/2), q^(m/2)/z; q^m)_inf`` with ``z = z_sign q^z_exp``."""
    z_exp, modulus, order = frac(z_exp), frac(modulus), frac(order)
    if modulus <= 0:
        raise DomainError("modulus must be positive")
    h = modulus / 2
    return _quot(order, [(modulus, modulus), (h + z_exp, modulus, z_sign), (h - z_exp, modulus, z_sign)])


# -- theta series --------------------------------------------------------------


@dataclass(frozen=True)
class ThetaSpec:
    j: Fraction
    m: Fraction

    def __post_init__(self) -> None:
        if self.m <= 0:
            raise DomainError("theta modulus m must be positive")


def _theta_reduce(j: Fraction, m: Fraction) -> tuple[Fraction, int]:
    """Reduce ``j`` into ``[0, m]`` using ``j -> -j`` and ``j -> j + 2m``.

    Returns the representative and the sign picked up by the g-series
    (each shift by ``2m`` flips the sign of g; h is invariant).
    """
    period = 2 * m
    k = floor((j + m) / period)
    jr = j - k * period  # in [-m, m)
    flips = k % 2
    if jr < 0:
        jr = -jr
    return jr, flips


def theta_h(j: RationalLike, m: RationalLike, order: RationalLike) -> PuiseuxSeries:
    """``h_{j,m} = q^(j^2/4m) (-q^(m-j), -q^(m+j), q^(2m); q^(2m))_inf``."""
    j, m, order = frac(j), frac(m), frac(order)
    ThetaSpec(j, m)
    jr, _ = _theta_reduce(j, m)
    return _quot(order, [(m - jr, 2 * m, -1), (m + jr, 2 * m, -1), (2 * m, 2 * m)], shift=jr * jr / (4 * m))


def theta_g(j: RationalLike, m: RationalLike, order: RationalLike) -> PuiseuxSeries:
    """``g_{j,m} = q^(j^2/4m) (q^(m+j), q^(m-j), q^(2m); q^(2m))_inf``."""
    j, m, order = frac(j), frac(m), frac(order)
    ThetaSpec(j, m)
    jr, flips = _theta_reduce(j, m)
    s = _quot(order, [(m + jr, 2 * m), (m - jr, 2 * m), (2 * m, 2 * m)], shift=jr * jr / (4 * m))
    return -s if flips else s


def theta_lattice(kind: str, j: RationalLike, m: RationalLike, order: RationalLike) -> PuiseuxSeries:
    """Direct sum ``sum_k (+-1)^k q^(m (k + j/2m)^2)`` over the integers."""
    j, m, order = frac(j), frac(m), frac(order)
    if kind not in ("h", "g"):
        raise DomainError("kind must be 'h' or 'g'")
    terms: dict[Fraction, int] = defaultdict(int)
    x0 = j / (2 * m)
    radius = isqrt(int(ceil(abs(order) / m)) + 1) + 2
    for k in range(floor(-x0) - radius, ceil(-x0) + radius + 1):
        e = m * (k + x0) ** 2
        if e < order:
            terms[e] += -1 if (kind == "g" and k % 2) else 1
    D = 1
    for e in terms:
        D = D * e.denominator // gcd(D, e.denominator)
    return PuiseuxSeries(D, {int(e * D): c for e, c in terms.items()}, order)


# -- generalized eta ------------------------------------------------------------


def p2(x: RationalLike) -> Fraction:
    """Second periodic Bernoulli function ``{x}^2 - {x} + 1/6``."""
    x = frac(x)
    f = x - floor(x)
    return f * f - f + Fraction(1, 6)


@dataclass(frozen=True)
class GenEtaSpec:
    """``eta_{delta, g}``; rational ``delta`` and ``g`` are allowed."""

    delta: Fraction
    g: Fraction

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", frac(self.delta))
        object.__setattr__(self, "g", frac(self.g))
        if self.delta <= 0 or not 0 <= self.g < self.delta:
            raise DomainError(f"need delta > 0 and 0 <= g < delta, got ({self.delta}, {self.g})")

    @property
    def prefactor(self) -> Fraction:
        return self.delta / 2 * p2(self.g / self.delta)


# Both congruence classes n = g and n = -g (mod delta) are multiplied in, so
# g = 0 and g = delta/2 give a squared product.  This is the reading under
# which the eta-quotient representations reproduce the Nahm sums exactly.
ETA_CONVENTION = "squared"


def gen_eta_factors(spec: GenEtaSpec, order: Fraction, power: int = 1, convention: str = ETA_CONVENTION):
    """Binomial factors of the product part of ``eta_{delta,g}``."""
    delta, g = spec.delta, spec.g
    first = g if g > 0 else delta
    second = delta - g
    out = _inf(first, delta, order, power=power)
    if convention == "once" and (g == 0 or 2 * g == delta):
        return out
    if convention not in ("once", "squared"):
        raise DomainError(f"unknown eta convention {convention!r}")
    return out + _inf(second, delta, order, power=power)


def gen_eta(spec: GenEtaSpec, order: RationalLike, convention: str = ETA_CONVENTION) -> PuiseuxSeries:
    """``q^((delta/2) P2(g/delta)) prod_{n = +-g mod delta} (1 - q^n)``."""
    order = frac(order)
    pref = spec.prefactor
    inner = order - pref
    if inner <= 0:
        return PuiseuxSeries.zero(order)
    return q_product(gen_eta_factors(spec, inner, 1, convention), inner).shift(pref)


@dataclass(frozen=True)
class EtaQuotientSpec:
    """``prod eta_{delta,g}^{r_{delta,g}}`` as a list of (factor, exponent)."""

    factors: tuple[tuple[GenEtaSpec, Fraction], ...]

    @classmethod
    def of(cls, *items: tuple[RationalLike, RationalLike, RationalLike]) -> "EtaQuotientSpec":
        """Build from ``(delta, g, exponent)`` triples."""
        return cls(tuple((GenEtaSpec(frac(dl), frac(g)), frac(x)) for dl, g, x in items))

    def __post_init__(self) -> None:
        for spec, x in self.factors:
            if x.denominator not in (1, 2):
                raise DomainError("eta exponents must be integers or half-integers")
            if x.denominator == 2 and not (spec.g == 0 or 2 * spec.g == spec.delta):
                raise DomainError("half-integer exponents need g = 0 or g = delta/2")

    def prefactor(self) -> Fraction:
        return sum((x * s.prefactor for s, x in self.factors), Fraction(0))


def eta_quotient(spec: EtaQuotientSpec, order: RationalLike, convention: str = ETA_CONVENTION) -> PuiseuxSeries:
    """Exact expansion; half-integer powers go through a series square root."""
    order = frac(order)
    pref = spec.prefactor()
    inner = order - pref
    if inner <= 0:
        return PuiseuxSeries.zero(order)
    mult: dict[Fraction, Fraction] = defaultdict(Fraction)
    for s, x in spec.factors:
        for _, e, _ in gen_eta_factors(s, inner, 1, convention):
            mult[e] += x
    whole: list[Factor] = []
    half: list[Factor] = []
    for e, x in mult.items():
        if x.denominator == 1:
            if x:
                whole.append((1, e, int(x)))
        else:
            whole.append((1, e, int(x - Fraction(1, 2))))
            half.append((1, e, 1))
    body = q_product(whole, inner)
    if half:
        body = body * sqrt(q_product(half, inner))
    return body.shift(pref)


# -- product sides of the identities -------------------------------------------------

RHS_TAGS = (
    "1.7", "1.8", "1.9", "1.10", "1.11", "1.12", "1.13", "1.14", "SumC",
    "2.1a", "2.1b", "2.1c", "2.1d", "2.2a", "2.2b", "2.3a", "2.3b", "2.4a", "2.4b",
    "W1.1", "W1.2", "Capparelli",
)  # fmt: skip

_NEEDS_J = {"1.8", "1.10", "1.12", "1.14", "2.1b", "2.1d", "2.2b", "2.4b", "W1.2"}


_DEN_ODD = [(1, 4), (3, 4), (4, 4)]  # (q, q^3, q^4; q^4)
_DEN_EVEN = [(2, 4), (2, 4), (4, 4)]  # (q^2, q^2, q^4; q^4)
_DEN_HALF = [(Fraction(1, 2), 2), (Fraction(3, 2), 2), (2, 2)]  # (q^1/2, q^3/2, q^2; q^2)


def _triple(a: RationalLike, b: RationalLike, m: RationalLike) -> list[tuple]:
    return [(a, m), (b, m), (m, m)]


def rhs_builder(tag: str, r: int | None = None, j: int | None = None, order: RationalLike = 40) -> PuiseuxSeries:
    """Product side of a named identity at rank ``r`` and index ``j``."""
    order = frac(order)
    if tag not in RHS_TAGS:
        raise DomainError(f"unknown identity tag {tag!r}")
    if tag == "Capparelli":
        return _quot(order, [(2, 6, -1), (3, 6, -1), (4, 6, -1), (6, 6, -1)])
    if r is None or r < 2:
        raise DomainError(f"{tag} needs r >= 2")
    if tag in ("SumC", "2.3a", "2.3b") and r < 3:
        raise DomainError(f"{tag} needs r >= 3")
    if tag in _NEEDS_J:
        if j is None or not 1 <= j <= r:
            raise DomainError(f"{tag} needs 1 <= j <= r")
    F = Fraction
    if tag == "1.7":
        m = 4 * r - 1
        return _quot(order, _triple(8 * r - 4, 8 * r, 16 * r - 4), _DEN_ODD) + _quot(
            order, [(1, m, -1, True), (4 * r - 2, m, 1, True), (m, m, -1, True)], _DEN_EVEN, F(r - 1, 2)
        )
    if tag == "1.8":
        m = 4 * r - 1
        return _quot(
            order, [(2 * j, m, 1, True), (4 * r - 2 * j - 1, m, -1, True), (m, m, -1, True)], _DEN_EVEN
        ) + _quot(order, _triple(4 * j, 16 * r - 4 * j - 4, 16 * r - 4), _DEN_ODD, F(3 * r - 2 * j - 1, 2))
    if tag == "1.9":
        m = 4 * r - 3
        return _quot(order, _triple(8 * r - 8, 8 * r - 4, 16 * r - 12), _DEN_ODD) + _quot(
            order, [(1, m, -1, True), (4 * r - 4, m, 1, True), (m, m, -1, True)], _DEN_EVEN, F(2 * r - 3, 4)
        )
    if tag == "1.10":
        m = 4 * r - 3
        return _quot(
            order, [(2 * j, m, 1, True), (4 * r - 3 - 2 * j, m, -1, True), (m, m, -1, True)], _DEN_EVEN
        ) + _quot(order, _triple(4 * j, 16 * r - 4 * j - 12, 16 * r - 12), _DEN_ODD, F(6 * r - 4 * j - 5, 4))
    if tag == "1.11":
        return _quot(order, _triple(F(1, 2), 2 * r - 1, F(4 * r - 1, 2)), _DEN_HALF)
    if tag == "1.12":
        return _quot(order, _triple(j, F(4 * r - 2 * j - 1, 2), F(4 * r - 1, 2)), _DEN_HALF)
    if tag == "1.13":
        return _quot(order, _triple(F(1, 2), 2 * r - 2, F(4 * r - 3, 2)), _DEN_HALF)
    if tag == "1.14":
        return _quot(order, _triple(j, F(4 * r - 2 * j - 3, 2), F(4 * r - 3, 2)), _DEN_HALF)
    if tag == "SumC":
        m = 4 * r - 1
        return _quot(order, _triple(8 * r + 4, 8 * r - 8, 16 * r - 4), _DEN_ODD) + _quot(
            order, [(3, m, -1, True), (4 * r - 4, m, 1, True), (m, m, -1, True)], _DEN_EVEN, F(r - 3, 2)
        )
    if tag == "2.1a":
        return _quot(order, _triple(4 * r - 2, 4 * r, 8 * r - 2), [(1, 1)])
    if tag == "2.1b":
        return _quot(order, _triple(2 * j, 8 * r - 2 * j - 2, 8 * r - 2), [(2, 1)])
    if tag == "2.1c":
        return _quot(order, _triple(4 * r - 4, 4 * r - 2, 8 * r - 6), [(1, 1)])
    if tag == "2.1d":
        return _quot(order, _triple(2 * j, 8 * r - 2 * j - 6, 8 * r - 6), [(2, 1)])
    if tag == "2.2a":
        s = _quot(order, _triple(1, 4 * r - 4, 4 * r - 3), [(4, 2)])
        return s * _geometric(order)
    if tag == "2.2b":
        return _quot(order, _triple(2 * j, 4 * r - 2 * j - 3, 4 * r - 3), [(2, 2)])
    if tag == "2.3a":
        return _quot(order, _triple(4 * r + 2, 4 * r - 4, 8 * r - 2), [(1, 1)])
    if tag == "2.3b":
        return _quot(order, _triple(F(3, 2), 2 * r - 2, F(4 * r - 1, 2)), [(1, 1)])
    if tag == "2.4a":
        s = _quot(order, _triple(1, 4 * r - 2, 4 * r - 1), [(4, 2)])
        return s * _geometric(order)
    if tag == "2.4b":
        return _quot(order, _triple(2 * j, 4 * r - 2 * j - 1, 4 * r - 1), [(2, 2)])
    if tag == "W1.1":
        # the lower modulus entry is 2r - 1, as the triple-product structure requires
        return _quot(order, [(F(1, 2), 1, -1)] + _triple(F(1, 2), 2 * r - 1, F(4 * r - 1, 2)), [(1, 1)])
    if tag == "W1.2":
        return _quot(order, [(F(1, 2), 1, -1)] + _triple(j, F(4 * r - 2 * j - 1, 2), F(4 * r - 1, 2)), [(1, 1)])
    raise AssertionError(tag)


def _geometric(order: Fraction) -> PuiseuxSeries:
    """``1/(1-q)``."""
    return q_product([(1, Fraction(1), -1)], order)


# -- Euler's identity -------------------------------------------------------------


def euler_sum(z_exp: RationalLike, z_sign: int, order: RationalLike) -> PuiseuxSeries:
    """``sum_n q^(n(n-1)/2) z^n / (q;q)_n`` with ``z = z_sign q^z_exp`` (``z_exp > 0``)."""
    z_exp, order = frac(z_exp), frac(order)
    if z_exp <= 0:
        raise DomainError("Euler sum needs a positive power of q")
    total = PuiseuxSeries.zero(order)
    n = 0
    while Fraction(n * (n - 1), 2) + n * z_exp < order:
        e = Fraction(n * (n - 1), 2) + n * z_exp
        term = q_product([(s, x, -1) for s, x, _ in pochhammer_factors(1, 1, 1, n)], order - e)
        total = total + term.shift(e).scale(z_sign**n)
        n += 1
    return total


def euler_product(z_exp: RationalLike, z_sign: int, order: RationalLike) -> PuiseuxSeries:
    """``(-z; q)_inf``."""
    return _quot(frac(order), [(frac(z_exp), 1, -z_sign)])
