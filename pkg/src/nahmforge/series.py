"""Exact truncated Puiseux series in q^(1/D) with rational coefficients.

A :class:`PuiseuxSeries` stores the coefficient of ``q^(k/D)`` under the
integer key ``k`` and is exact for every exponent strictly below ``order``.
Binary operations rebase both operands to the lcm of their denominators and
return a result whose order is the smaller of the two input orders.  A
product with a factor of negative valuation ``v`` loses ``|v|`` from the other
factor's order, since those coefficients are no longer determined.

Coefficients are kept as plain ``int`` whenever they are integral, which is
by far the common case for q-series, and as :class:`fractions.Fraction`
otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import ceil, gcd, lcm
from typing import Iterable, Iterator, Mapping, Sequence, Union

Rational = Fraction
FracExponent = Fraction
Coeff = Union[int, Fraction]
RationalLike = Union[int, Fraction, str]


class SeriesError(ValueError):
    """Raised for operations with no representable result."""


def frac(x: RationalLike) -> Fraction:
    """Coerce ints, Fractions and ``"n/d"`` strings to a Fraction."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, float):
        raise TypeError("floats are not accepted as exact rationals")
    return Fraction(x)


def _norm(c: Coeff) -> Coeff:
    if isinstance(c, Fraction) and c.denominator == 1:
        return c.numerator
    return c


def _limit(order: Fraction, D: int) -> int:
    """Smallest integer k with k/D >= order."""
    return ceil(order * D)


def _div(c: Coeff, d: Coeff) -> Coeff:
    if d == 1:
        return c
    if d == -1:
        return -c
    return _norm(Fraction(c) / d)


class PuiseuxSeries:
    """Immutable truncated series ``sum c_k q^(k/D) + O(q^order)``."""

    __slots__ = ("D", "_coeffs", "order")

    def __init__(self, D: int, coeffs: Mapping[int, Coeff], order: RationalLike):
        if D < 1:
            raise SeriesError(f"exponent denominator must be positive, got {D}")
        order = frac(order)
        lim = _limit(order, D)
        clean: dict[int, Coeff] = {}
        for k, c in coeffs.items():
            if c and k < lim:
                clean[k] = _norm(c)
        self.D = D
        self._coeffs = clean
        self.order = order

    @classmethod
    def _raw(cls, D: int, coeffs: dict[int, Coeff], order: Fraction) -> "PuiseuxSeries":
        # Trusted constructor: coeffs already cleaned and truncated.
        obj = cls.__new__(cls)
        obj.D = D
        obj._coeffs = coeffs
        obj.order = order
        return obj

    @classmethod
    def from_dense(cls, D: int, lo: int, values: Sequence[Coeff], order: RationalLike) -> "PuiseuxSeries":
        """Build from a dense list where ``values[i]`` is the coefficient of q^((lo+i)/D)."""
        return cls(D, {lo + i: c for i, c in enumerate(values) if c}, order)

    @classmethod
    def zero(cls, order: RationalLike, D: int = 1) -> "PuiseuxSeries":
        return cls._raw(D, {}, frac(order))

    @classmethod
    def one(cls, order: RationalLike) -> "PuiseuxSeries":
        return monomial(0, 1, order)

    # -- inspection -----------------------------------------------------

    @property
    def coeffs(self) -> dict[int, Coeff]:
        return dict(self._coeffs)

    def terms(self) -> list[tuple[Fraction, Fraction]]:
        """Sorted ``(exponent, coefficient)`` pairs."""
        return [(Fraction(k, self.D), Fraction(c)) for k, c in sorted(self._coeffs.items())]

    def coeff(self, e: RationalLike) -> Fraction:
        e = frac(e)
        if e >= self.order:
            raise SeriesError(f"coefficient of q^{e} is beyond the truncation order {self.order}")
        k = e * self.D
        if k.denominator != 1:
            return Fraction(0)
        return Fraction(self._coeffs.get(k.numerator, 0))

    def is_zero(self) -> bool:
        return not self._coeffs

    def valuation(self) -> Fraction:
        if not self._coeffs:
            raise SeriesError("the zero series has no valuation")
        return Fraction(min(self._coeffs), self.D)

    def leading(self) -> tuple[Fraction, Fraction]:
        v = self.valuation()
        return v, Fraction(self._coeffs[int(v * self.D)])

    def __len__(self) -> int:
        return len(self._coeffs)

    def __iter__(self) -> Iterator[tuple[Fraction, Fraction]]:
        return iter(self.terms())

    # -- structural transformations ---------------------------------------

    def rebase(self, D: int) -> "PuiseuxSeries":
        if D == self.D:
            return self
        if D % self.D:
            raise SeriesError(f"cannot rebase denominator {self.D} to non-multiple {D}")
        m = D // self.D
        return PuiseuxSeries._raw(D, {k * m: c for k, c in self._coeffs.items()}, self.order)

    def reduced(self) -> "PuiseuxSeries":
        """Same series with the smallest exponent denominator that represents it."""
        g = self.D
        for k in self._coeffs:
            g = gcd(g, k)
            if g == 1:
                return self
        return PuiseuxSeries._raw(self.D // g, {k // g: c for k, c in self._coeffs.items()}, self.order)

    def truncate(self, order: RationalLike) -> "PuiseuxSeries":
        order = frac(order)
        if order >= self.order:
            return self
        lim = _limit(order, self.D)
        return PuiseuxSeries._raw(self.D, {k: c for k, c in self._coeffs.items() if k < lim}, order)

    def shift(self, e: RationalLike) -> "PuiseuxSeries":
        """Multiply by the exact monomial q^e; the order moves with it."""
        e = frac(e)
        D = lcm(self.D, e.denominator)
        s = self.rebase(D)
        de = int(e * D)
        return PuiseuxSeries._raw(D, {k + de: c for k, c in s._coeffs.items()}, self.order + e)

    def dilate(self, m: RationalLike) -> "PuiseuxSeries":
        """Substitute q -> q^m for a positive rational m."""
        m = frac(m)
        if m <= 0:
            raise SeriesError("dilation factor must be positive")
        D = self.D * m.denominator
        return PuiseuxSeries._raw(
            D, {k * m.numerator: c for k, c in self._coeffs.items()}, self.order * m
        )

    def scale(self, c: RationalLike) -> "PuiseuxSeries":
        c = _norm(frac(c))
        if not c:
            return PuiseuxSeries._raw(self.D, {}, self.order)
        return PuiseuxSeries._raw(self.D, {k: _norm(v * c) for k, v in self._coeffs.items()}, self.order)

    # -- arithmetic -------------------------------------------------------

    def __neg__(self) -> "PuiseuxSeries":
        return PuiseuxSeries._raw(self.D, {k: -c for k, c in self._coeffs.items()}, self.order)

    def __add__(self, other: object) -> "PuiseuxSeries":
        if isinstance(other, (int, Fraction)):
            other = monomial(0, other, self.order)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        D = lcm(self.D, other.D)
        a, b = self.rebase(D), other.rebase(D)
        order = min(a.order, b.order)
        lim = _limit(order, D)
        out = {k: c for k, c in a._coeffs.items() if k < lim}
        for k, c in b._coeffs.items():
            if k < lim:
                v = out.get(k, 0) + c
                if v:
                    out[k] = _norm(v)
                else:
                    out.pop(k, None)
        return PuiseuxSeries._raw(D, out, order)

    __radd__ = __add__

    def __sub__(self, other: object) -> "PuiseuxSeries":
        if isinstance(other, (int, Fraction)):
            other = monomial(0, other, self.order)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: object) -> "PuiseuxSeries":
        return (-self) + other

    def __mul__(self, other: object) -> "PuiseuxSeries":
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        D = lcm(self.D, other.D)
        a, b = self.rebase(D), other.rebase(D)
        # min of the orders; a negative valuation on one side costs the other side
        va = Fraction(min(min(a._coeffs), 0), D) if a._coeffs else Fraction(0)
        vb = Fraction(min(min(b._coeffs), 0), D) if b._coeffs else Fraction(0)
        order = min(a.order + vb, b.order + va)
        lim = _limit(order, D)
        out: dict[int, Coeff] = {}
        bi = sorted(b._coeffs.items())
        if not bi:
            return PuiseuxSeries._raw(D, {}, order)
        bmin = bi[0][0]
        for ka, ca in sorted(a._coeffs.items()):
            if ka + bmin >= lim:
                break
            for kb, cb in bi:
                k = ka + kb
                if k >= lim:
                    break
                out[k] = out.get(k, 0) + ca * cb
        return PuiseuxSeries(D, out, order)

    __rmul__ = __mul__

    def __truediv__(self, other: object) -> "PuiseuxSeries":
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("division of a series by zero")
            return self.scale(Fraction(1) / Fraction(other))
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        return self * invert(other)

    def __pow__(self, n: int) -> "PuiseuxSeries":
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return invert(self) ** (-n)
        result = monomial(0, 1, self.order)
        base = self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PuiseuxSeries):
            return NotImplemented
        if self.order != other.order:
            return False
        D = lcm(self.D, other.D)
        return self.rebase(D)._coeffs == other.rebase(D)._coeffs

    def __hash__(self) -> int:
        r = self.reduced()
        return hash((r.D, frozenset(r._coeffs.items()), r.order))

    def __repr__(self) -> str:
        return f"PuiseuxSeries({format_series(self)})"

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        r = self.reduced()
        return {
            "D": r.D,
            "order_num": r.order.numerator,
            "order_den": r.order.denominator,
            "terms": [[k, _fmt_rational(c)] for k, c in sorted(r._coeffs.items())],
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "PuiseuxSeries":
        order = Fraction(int(data["order_num"]), int(data["order_den"]))
        return cls(int(data["D"]), {int(k): frac(c) for k, c in data["terms"]}, order)


def _fmt_rational(c: Coeff) -> str:
    c = Fraction(c)
    return f"{c.numerator}/{c.denominator}"


def format_series(s: PuiseuxSeries, order_term: bool = True) -> str:
    """Human-readable form such as ``1 - q^(1/2) + 2*q^3 + O(q^5)``."""
    parts: list[str] = []
    for e, c in s.terms():
        if e == 0:
            mono = ""
        elif e == 1:
            mono = "q"
        elif e.denominator == 1:
            mono = f"q^{e.numerator}"
        else:
            mono = f"q^({e})"
        mag = abs(c)
        sign = "-" if c < 0 else "+"
        if not mono:
            body = str(mag)
        elif mag == 1:
            body = mono
        else:
            body = f"{mag}*{mono}"
        parts.append(f"{sign} {body}")
    if order_term:
        parts.append(f"+ O(q^{s.order})" if s.order.denominator == 1 else f"+ O(q^({s.order}))")
    if not parts:
        return "0"
    text = " ".join(parts)
    if text.startswith("+ "):
        text = text[2:]
    elif text.startswith("- "):
        text = "-" + text[2:]
    return text


# -- constructors ---------------------------------------------------------------


def monomial(e: RationalLike, c: RationalLike, order: RationalLike) -> PuiseuxSeries:
    """The single term ``c q^e`` truncated at ``order``."""
    e, c, order = frac(e), frac(c), frac(order)
    if e >= order:
        raise SeriesError(f"monomial q^{e} lies at or beyond truncation order {order}")
    return PuiseuxSeries(e.denominator, {e.numerator: c}, order)


def add(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a + b


def mul(a: PuiseuxSeries, b: PuiseuxSeries) -> PuiseuxSeries:
    return a * b


def neg(a: PuiseuxSeries) -> PuiseuxSeries:
    return -a


def invert(a: PuiseuxSeries) -> PuiseuxSeries:
    """Multiplicative inverse.

    If ``a = q^v (a_0 + ...)`` is known below ``order``, the inverse is known
    below ``order - 2v``.
    """
    if a.is_zero():
        raise SeriesError("cannot invert a series that vanishes to its truncation order")
    D = a.D
    kv = min(a._coeffs)
    a0 = a._coeffs[kv]
    v = Fraction(kv, D)
    inner_lim = _limit(a.order - v, D)
    rest = sorted((k - kv, c) for k, c in a._coeffs.items() if k != kv)
    out: list[Coeff] = [0] * inner_lim
    if inner_lim:
        out[0] = _div(1, a0)
    for n in range(1, inner_lim):
        acc: Coeff = 0
        for k, c in rest:
            if k > n:
                break
            acc += c * out[n - k]
        if acc:
            out[n] = _div(-acc, a0)
    return PuiseuxSeries.from_dense(D, -kv, out, a.order - 2 * v)


def sqrt(a: PuiseuxSeries) -> PuiseuxSeries:
    """Square root of a series whose leading coefficient is exactly 1."""
    if a.is_zero():
        raise SeriesError("square root of the zero series")
    v, c0 = a.leading()
    if c0 != 1:
        raise SeriesError(f"square root needs leading coefficient 1, got {c0}")
    D = lcm(a.D, (v / 2).denominator)
    s = a.rebase(D)
    kv = int(v * D)
    inner_lim = _limit(s.order - v, D)
    u = {k - kv: c for k, c in s._coeffs.items()}
    out: list[Coeff] = [0] * inner_lim
    if inner_lim:
        out[0] = 1
    for n in range(1, inner_lim):
        acc: Coeff = u.get(n, 0)
        for k in range(1, n):
            if out[k] and out[n - k]:
                acc -= out[k] * out[n - k]
        out[n] = _norm(Fraction(acc) / 2) if acc else 0
    half = int(v * D) // 2
    return PuiseuxSeries.from_dense(D, half, out, s.order - v / 2)


# -- q-products -----------------------------------------------------------------

# A factor ``(sign, exp, power)`` stands for ``(1 - sign*q^exp)^power``.
Factor = tuple[int, Fraction, int]


def q_product(factors: Iterable[tuple[int, RationalLike, int]], order: RationalLike) -> PuiseuxSeries:
    """Expand a finite product of binomials ``(1 - s q^e)^p`` to ``order``.

    Factors with ``e < 0`` are rewritten as ``-s q^e (1 - s q^-e)`` so the
    dense kernel only ever sees nonnegative exponents.
    """
    order = frac(order)
    norm: list[Factor] = []
    shift = Fraction(0)
    const: Fraction = Fraction(1)
    for s, e, p in factors:
        if p == 0:
            continue
        if s not in (1, -1):
            raise SeriesError(f"factor sign must be +1 or -1, got {s}")
        e = frac(e)
        if e == 0:
            if s == 1:
                if p < 0:
                    raise SeriesError("division by a vanishing factor (1 - q^0)")
                return PuiseuxSeries.zero(order)
            const *= Fraction(2) ** p
            continue
        if e < 0:
            shift += e * p
            const *= Fraction(-s) ** p
            e = -e
        norm.append((s, e, p))
    D = 1
    for _, e, _ in norm:
        D = lcm(D, e.denominator)
    D = lcm(D, shift.denominator)
    inner_order = order - shift
    lim = _limit(inner_order, D)
    if lim <= 0:
        return PuiseuxSeries.zero(order, D)
    vals: list[Coeff] = [0] * lim
    vals[0] = 1
    for s, e, p in norm:
        x = int(e * D)
        if x >= lim:
            continue
        if p > 0:
            for _ in range(p):
                # multiply by (1 - s q^x): descend so each slot reads the old value
                if s == 1:
                    for k in range(lim - 1, x - 1, -1):
                        if vals[k - x]:
                            vals[k] -= vals[k - x]
                else:
                    for k in range(lim - 1, x - 1, -1):
                        if vals[k - x]:
                            vals[k] += vals[k - x]
        else:
            for _ in range(-p):
                # divide by (1 - s q^x): ascend so each slot reads the new value
                if s == 1:
                    for k in range(x, lim):
                        if vals[k - x]:
                            vals[k] += vals[k - x]
                else:
                    for k in range(x, lim):
                        if vals[k - x]:
                            vals[k] -= vals[k - x]
    res = PuiseuxSeries.from_dense(D, 0, vals, inner_order)
    if const != 1:
        res = res.scale(const)
    return res.shift(shift) if shift else res


def _check_step(step: Fraction) -> None:
    if step <= 0:
        raise SeriesError(f"Pochhammer step must be positive, got {step}")


def pochhammer_factors(
    base_exp: RationalLike, base_sign: int, step: RationalLike, n: int, power: int = 1
) -> list[Factor]:
    """Factors of ``(s q^e; q^t)_n`` raised to ``power``."""
    e, t = frac(base_exp), frac(step)
    _check_step(t)
    return [(base_sign, e + i * t, power) for i in range(n)]


def infinite_factors(
    base_exp: RationalLike,
    base_sign: int,
    step: RationalLike,
    order: RationalLike,
    power: int = 1,
    alternating: bool = False,
) -> list[Factor]:
    """Factors of ``(s q^e; q^t)_inf`` (or ``(s q^e; -q^t)_inf``) below ``order``."""
    e, t, order = frac(base_exp), frac(step), frac(order)
    _check_step(t)
    if e <= 0:
        raise SeriesError(f"infinite product with base exponent {e} <= 0 does not converge")
    out: list[Factor] = []
    i = 0
    while e + i * t < order:
        s = base_sign * (-1 if alternating and i % 2 else 1)
        out.append((s, e + i * t, power))
        i += 1
    return out


def pochhammer_finite(
    base_exp: RationalLike, base_sign: int, step: RationalLike, n: int, order: RationalLike
) -> PuiseuxSeries:
    """``prod_{i<n} (1 - s q^(e + i t))`` truncated at ``order``."""
    if n < 0:
        raise SeriesError("Pochhammer length must be nonnegative")
    return q_product(pochhammer_factors(base_exp, base_sign, step, n), order)


def pochhammer_infinite(
    base_exp: RationalLike, base_sign: int, step: RationalLike, order: RationalLike
) -> PuiseuxSeries:
    """``(s q^e; q^t)_inf`` truncated at ``order``; needs ``e > 0``."""
    return q_product(infinite_factors(base_exp, base_sign, step, order), order)


def alt_pochhammer_infinite(
    base_exp: RationalLike, base_sign: int, step: RationalLike, order: RationalLike
) -> PuiseuxSeries:
    """``(s q^e; -q^t)_inf = prod_n (1 - s (-1)^n q^(e + n t))``."""
    return q_product(infinite_factors(base_exp, base_sign, step, order, alternating=True), order)


# -- comparison -------------------------------------------------------------------


@dataclass(frozen=True)
class Comparison:
    """Outcome of :func:`series_equal`; truthy iff the series agree."""

    equal: bool
    order: Fraction
    exponent: Fraction | None = None
    left: Fraction | None = None
    right: Fraction | None = None

    def __bool__(self) -> bool:
        return self.equal

    def describe(self) -> str:
        if self.equal:
            return f"equal below q^{self.order}"
        return f"mismatch at q^{self.exponent}: {self.left} != {self.right}"


def series_equal(a: PuiseuxSeries, b: PuiseuxSeries) -> Comparison:
    """Compare coefficients below ``min(a.order, b.order)``."""
    D = lcm(a.D, b.D)
    ra, rb = a.rebase(D), b.rebase(D)
    order = min(a.order, b.order)
    lim = _limit(order, D)
    keys = sorted(k for k in set(ra._coeffs) | set(rb._coeffs) if k < lim)
    for k in keys:
        ca, cb = ra._coeffs.get(k, 0), rb._coeffs.get(k, 0)
        if ca != cb:
            return Comparison(False, order, Fraction(k, D), Fraction(ca), Fraction(cb))
    return Comparison(True, order)
