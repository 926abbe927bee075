"""Bailey pairs: the defining relation, the two limiting lemmas, the pair catalogue.

A pair ``(alpha_n, beta_n)`` relative to ``a = q^a_exp`` satisfies

    beta_n = sum_{k<=n} alpha_k / ((q;q)_{n-k} (aq;q)_{n+k}).

Sequences are evaluated lazily: ``seq(n, order)`` returns an exact series
known below ``order``, memoized per index at the largest order requested.
Every builder here promises its result is valid to at least the requested
order, padding its inputs when a factor has negative valuation.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, lcm
from typing import Callable, Iterable, Sequence

from .nahm import DescendingSumSpec, DomainError, eval_descending
from .products import jacobi_triple_product, rhs_builder
from .series import (
    Comparison,
    PuiseuxSeries,
    RationalLike,
    SeriesError,
    frac,
    pochhammer_factors,
    q_product,
    series_equal,
)

Builder = Callable[[int, Fraction], PuiseuxSeries]

CATALOGUE_TAGS = (
    "C1", "C3", "C4", "C4*", "C5", "C6", "C7", "C7*",
    "G1", "G1*", "G2", "G4", "G4*", "G4**", "G5", "W1", "W2",
)


class ConvergenceError(SeriesError):
    """A limit did not stabilize within the search budget."""


# -- lazily evaluated sequences ------------------------------------------------------


class Sequence_:
    """Memoized ``n -> series`` map; ``self(n, order)`` is exact below ``order``."""

    def __init__(self, build: Builder, D: int = 1):
        self._build = build
        self._D = D
        self._memo: dict[int, PuiseuxSeries] = {}
        self._lock = threading.Lock()

    def __call__(self, n: int, order: RationalLike) -> PuiseuxSeries:
        order = frac(order)
        if n < 0:
            return PuiseuxSeries.zero(order, self._D)
        with self._lock:
            hit = self._memo.get(n)
        if hit is not None and hit.order >= order:
            return hit.truncate(order)
        s = self._build(n, order)
        if s.order < order:
            raise SeriesError(f"sequence term {n} came back valid only to {s.order} < {order}")
        D = lcm(s.D, self._D)
        s = s.rebase(D)
        with self._lock:
            self._memo[n] = s
        return s.truncate(order)


@dataclass(frozen=True)
class BaileyPair:
    a_exp: Fraction
    alpha: Sequence_ = field(compare=False)
    beta: Sequence_ = field(compare=False)
    label: str = ""

    @classmethod
    def make(cls, a_exp: RationalLike, alpha: Builder, beta: Builder, label: str = "", D: int = 1) -> "BaileyPair":
        return cls(frac(a_exp), Sequence_(alpha, D), Sequence_(beta, D), label)


# -- small exact building blocks ------------------------------------------------------


def _laurent(terms: Iterable[tuple[RationalLike, RationalLike]], order: Fraction) -> PuiseuxSeries:
    """Finite sum of ``c q^e`` truncated at ``order``."""
    acc: dict[Fraction, Fraction] = {}
    for e, c in terms:
        e = frac(e)
        acc[e] = acc.get(e, Fraction(0)) + frac(c)
    D = 1
    for e in acc:
        D = lcm(D, e.denominator)
    return PuiseuxSeries(D, {int(e * D): c for e, c in acc.items() if c}, order)


def _geom(start: RationalLike, step: RationalLike, count: int) -> list[tuple[Fraction, int]]:
    """Terms of ``q^start + q^(start+step) + ... `` with ``count`` terms."""
    start, step = frac(start), frac(step)
    return [(start + i * step, 1) for i in range(count)]


def _scaled(terms: Iterable[tuple[Fraction, int]], e: RationalLike, c: int) -> list[tuple[Fraction, int]]:
    e = frac(e)
    return [(x + e, c * y) for x, y in terms]


def _times_product(x: PuiseuxSeries, factors: list, order: Fraction) -> PuiseuxSeries:
    """``x`` times a q-product of nonnegative valuation, valid below ``order``.

    ``x`` must be valid below ``order``; the product is expanded further when
    ``x`` has negative valuation.
    """
    if x.is_zero():
        return PuiseuxSeries.zero(order, x.D)
    pad = max(Fraction(0), -x.valuation())
    return (x * q_product(factors, order + pad)).truncate(order)


def _inv_poch(e: RationalLike, step: RationalLike, n: int, sign: int = 1) -> list:
    """Factors of ``1/(s q^e; q^step)_n``."""
    return pochhammer_factors(e, sign, step, n, power=-1)


# -- the catalogue -------------------------------------------------------------------


def _c_alpha(even: Callable[[int], list], odd: Callable[[int], list] | None, unit_zero: bool):
    """Group C style ``alpha``: separate closed forms for even and odd indices."""

    def build(n: int, order: Fraction) -> PuiseuxSeries:
        if n == 0 and unit_zero:
            return _laurent([(0, 1)], order)
        m, parity = divmod(n, 2)
        if parity and odd is None:
            return PuiseuxSeries.zero(order)
        return _laurent((odd if parity else even)(m), order)

    return build


def _beta_product(num: Callable[[int], list], den: Callable[[int], list]) -> Builder:
    """``beta_n = (Laurent polynomial num(n)) / (q-product den(n))``."""

    def build(n: int, order: Fraction) -> PuiseuxSeries:
        numerator = _laurent(num(n), order)
        return _times_product(numerator, den(n), order)

    return build


def _sign(n: int) -> int:
    return -1 if n % 2 else 1


def _pair_C(tag: str) -> BaileyPair:
    def den13(n):  # 1/((q;q)_n (q;q^2)_n)
        return _inv_poch(1, 1, n) + _inv_poch(1, 2, n)

    def den33(n):  # 1/((q;q)_n (q^3;q^2)_n)
        return _inv_poch(1, 1, n) + _inv_poch(3, 2, n)

    def tri(n):
        return Fraction(n * n - n, 2)

    if tag == "C1":
        alpha = _c_alpha(lambda m: [(3 * m * m + m, _sign(m)), (3 * m * m - m, _sign(m))], None, True)
        return BaileyPair.make(0, alpha, _beta_product(lambda n: [(0, 1)], den13), tag)
    if tag == "C3":
        alpha = _c_alpha(
            lambda m: [(3 * m * m + m, _sign(m))], lambda m: [(3 * m * m + 5 * m + 2, -_sign(m))], False
        )
        return BaileyPair.make(1, alpha, _beta_product(lambda n: [(0, 1)], den33), tag)
    if tag == "C4":
        alpha = _c_alpha(lambda m: [(3 * m * m + 3 * m, _sign(m))], lambda m: [(3 * m * m + 3 * m, -_sign(m))], False)
        return BaileyPair.make(1, alpha, _beta_product(lambda n: [(n, 1)], den33), tag)
    if tag == "C4*":
        alpha = _c_alpha(lambda m: _scaled(_geom(0, 2, 2 * m + 1), 3 * m * m + m, _sign(m)), None, False)
        return BaileyPair.make(2, alpha, _beta_product(lambda n: [(0, 1)], den33), tag)
    if tag == "C5":
        alpha = _c_alpha(lambda m: [(m * m + m, _sign(m)), (m * m - m, _sign(m))], None, True)
        return BaileyPair.make(0, alpha, _beta_product(lambda n: [(tri(n), 1)], den13), tag)
    if tag == "C6":
        alpha = _c_alpha(lambda m: [(m * m - m, _sign(m))], lambda m: [(m * m + 3 * m + 2, -_sign(m))], False)
        return BaileyPair.make(1, alpha, _beta_product(lambda n: [(tri(n), 1)], den33), tag)
    if tag == "C7":
        alpha = _c_alpha(lambda m: [(m * m + m, _sign(m))], lambda m: [(m * m + m, -_sign(m))], False)
        return BaileyPair.make(1, alpha, _beta_product(lambda n: [(tri(n) + n, 1)], den33), tag)
    if tag == "C7*":
        alpha = _c_alpha(lambda m: _scaled(_geom(0, 2, 2 * m + 1), m * m - m, _sign(m)), None, False)
        return BaileyPair.make(2, alpha, _beta_product(lambda n: [(tri(n), 1)], den33), tag)
    raise DomainError(f"unknown Bailey pair {tag!r}")


def _g_alpha(terms: Callable[[int], list], unit_zero: bool) -> Builder:
    def build(n: int, order: Fraction) -> PuiseuxSeries:
        if n == 0 and unit_zero:
            return _laurent([(0, 1)], order)
        return _laurent(terms(n), order)

    return build


def _pair_G(tag: str) -> BaileyPair:
    half = Fraction(1, 2)

    def den(first: Fraction):  # 1/((-q^first;q)_n (q^2;q^2)_n)
        return lambda n: _inv_poch(first, 1, n, sign=-1) + _inv_poch(2, 2, n)

    def c2(n):
        return Fraction(n * (n - 1), 2)

    if tag == "G1":
        alpha = _g_alpha(lambda n: _scaled([(0, 1), (Fraction(n, 2), 1)], half * n * n + half * c2(n), _sign(n)), True)
        return BaileyPair.make(0, alpha, _beta_product(lambda n: [(0, 1)], den(half)), tag, D=4)
    if tag == "G1*":
        alpha = _g_alpha(lambda n: _scaled(_geom(-n, 1, 2 * n + 1), Fraction(3, 2) * c2(n + 1), _sign(n)), False)
        return BaileyPair.make(1, alpha, _beta_product(lambda n: [(0, 1)], den(half)), tag, D=4)
    if tag == "G2":
        alpha = _g_alpha(
            lambda n: _scaled(_geom(-half * n, half, 2 * n + 1), Fraction(3, 2) * c2(n + 1), _sign(n)), False
        )
        return BaileyPair.make(1, alpha, _beta_product(lambda n: [(0, 1)], den(Fraction(3, 2))), tag, D=4)
    if tag == "G4":
        alpha = _g_alpha(lambda n: _scaled([(0, 1), (half * n, 1)], half * c2(n), _sign(n)), True)
        beta = _beta_product(lambda n: [(half * n * n, _sign(n))], den(half))
        return BaileyPair.make(0, alpha, beta, tag, D=4)
    if tag == "G4*":
        alpha = _g_alpha(lambda n: _scaled([(0, 1), (Fraction(3, 2) * n, 1)], half * c2(n) - half * n, _sign(n)), True)
        beta = _beta_product(lambda n: [(half * n * n - n, _sign(n))], den(half))
        return BaileyPair.make(0, alpha, beta, tag, D=4)
    if tag == "G4**":
        quarter = Fraction(1, 4)
        alpha = _g_alpha(lambda n: _scaled(_geom(0, 1, 2 * n + 1), quarter * n * n - 3 * quarter * n, _sign(n)), False)
        beta = _beta_product(lambda n: [(half * n * n - n, _sign(n))], den(half))
        return BaileyPair.make(1, alpha, beta, tag, D=4)
    if tag == "G5":
        alpha = _g_alpha(lambda n: _scaled(_geom(0, half, 2 * n + 1), half * c2(n), _sign(n)), False)
        beta = _beta_product(lambda n: [(half * n * n, _sign(n))], den(Fraction(3, 2)))
        return BaileyPair.make(1, alpha, beta, tag, D=4)
    raise DomainError(f"unknown Bailey pair {tag!r}")


def _pair_W(tag: str) -> BaileyPair:
    if tag == "W1":
        alpha = _c_alpha(
            lambda m: [(3 * m * m + 3 * m, _sign(m)), (3 * m * m - 3 * m, _sign(m))], None, True
        )
        beta = _beta_product(
            lambda n: [(n, 1), (n - 1, 1), (2 * n - 1, -1)],
            lambda n: _inv_poch(1, 1, n) + _inv_poch(1, 2, n),
        )
        return BaileyPair.make(0, alpha, beta, tag)
    if tag == "W2":
        return _w2(2, tag)
    raise DomainError(f"unknown Bailey pair {tag!r}")


def _w2(second_base: int, label: str) -> BaileyPair:
    """The ``a = q`` Wang pair with ``beta_n`` over ``(-q^(3/2);q)_n (q^b;q^2)_n``."""
    half = Fraction(1, 2)
    alpha = _g_alpha(lambda n: _scaled(_geom(0, half, 6 * n + 3), Fraction(3, 4) * (n * n - n), _sign(n)), False)
    beta = _beta_product(
        lambda n: [(n, 1), (n + 1, 1), (2 * n + half, 1)],
        lambda n: _inv_poch(Fraction(3, 2), 1, n, sign=-1) + _inv_poch(second_base, 2, n),
    )
    return BaileyPair.make(1, alpha, beta, label, D=2)


def printed_w2() -> BaileyPair:
    """The ``a = q`` Wang pair with the ``(q;q^2)_n`` denominator.

    It is not a Bailey pair: the relation already fails at ``n = 1``.  The
    catalogue entry uses ``(q^2;q^2)_n``, the form its own iterates carry.
    """
    return _w2(1, "W2-printed")


def catalogue(tag: str) -> BaileyPair:
    """A catalogue seed pair (alpha_0 = 1 where the closed form doubles it)."""
    if tag not in CATALOGUE_TAGS:
        raise DomainError(f"unknown Bailey pair {tag!r}; expected one of {CATALOGUE_TAGS}")
    if tag.startswith("C"):
        return _pair_C(tag)
    if tag.startswith("G"):
        return _pair_G(tag)
    return _pair_W(tag)


def unit_pair(a_exp: RationalLike = 0) -> BaileyPair:
    """``alpha_n = [n = 0]``, ``beta_n = 1/((q;q)_n (aq;q)_n)``."""
    a = frac(a_exp)

    def alpha(n: int, order: Fraction) -> PuiseuxSeries:
        return _laurent([(0, 1)] if n == 0 else [], order)

    def beta(n: int, order: Fraction) -> PuiseuxSeries:
        return q_product(_inv_poch(1, 1, n) + _inv_poch(a + 1, 1, n), order)

    return BaileyPair.make(a, alpha, beta, f"unit(a=q^{a})")


# -- the defining relation ------------------------------------------------------------


@dataclass(frozen=True)
class PairReport:
    """Outcome of :func:`verify_pair`; truthy iff every checked index agrees."""

    ok: bool
    label: str
    checked: int
    order: Fraction
    n: int | None = None
    comparison: Comparison | None = None

    def __bool__(self) -> bool:
        return self.ok

    def describe(self) -> str:
        if self.ok:
            return f"{self.label}: Bailey relation holds for n <= {self.checked} below q^{self.order}"
        return f"{self.label}: Bailey relation fails at n={self.n}: {self.comparison.describe()}"


def convolve_alpha(pair: BaileyPair, n: int, order: RationalLike) -> PuiseuxSeries:
    """``sum_{k<=n} alpha_k / ((q;q)_{n-k} (aq;q)_{n+k})``."""
    order = frac(order)
    a = pair.a_exp
    total = PuiseuxSeries.zero(order)
    for k in range(n + 1):
        ak = pair.alpha(k, order)
        total = total + _times_product(ak, _inv_poch(1, 1, n - k) + _inv_poch(a + 1, 1, n + k), order)
    return total


def verify_pair(pair: BaileyPair, n_max: int, order: RationalLike) -> PairReport:
    order = frac(order)
    for n in range(n_max + 1):
        cmp = series_equal(pair.beta(n, order), convolve_alpha(pair, n, order))
        if not cmp:
            return PairReport(False, pair.label, n_max, order, n, cmp)
    return PairReport(True, pair.label, n_max, order)


# -- the limiting lemmas --------------------------------------------------------------


def transform_S1(pair: BaileyPair) -> BaileyPair:
    """``alpha'_n = a^n q^(n^2) alpha_n``, ``beta'_n = sum_k a^k q^(k^2) beta_k / (q;q)_{n-k}``."""
    a = pair.a_exp

    def alpha(n: int, order: Fraction) -> PuiseuxSeries:
        e = n * a + n * n
        return pair.alpha(n, order - e).shift(e)

    def beta(n: int, order: Fraction) -> PuiseuxSeries:
        total = PuiseuxSeries.zero(order)
        for k in range(n + 1):
            e = k * a + k * k
            bk = pair.beta(k, order - e).shift(e)
            total = total + _times_product(bk, _inv_poch(1, 1, n - k), order)
        return total

    return BaileyPair.make(a, alpha, beta, f"S1({pair.label})", pair.alpha._D)


def transform_shift(pair: BaileyPair) -> BaileyPair:
    """Pair relative to ``a/q`` from a pair relative to ``a``.

    ``alpha'_n = (1-a)(q^n alpha_n/(1-a q^2n) - q^(n-1) alpha_{n-1}/(1-a q^(2n-2)))``
    and ``beta'_n = q^n beta_n``.
    """
    a = pair.a_exp
    if a < 1:
        raise DomainError(f"the shift lemma needs a = q^e with e >= 1, got e = {a}")

    def ratio(m: int) -> list:  # (1-a) / (1 - a q^(2m))
        return [(1, a, 1), (1, a + 2 * m, -1)]

    def alpha(n: int, order: Fraction) -> PuiseuxSeries:
        if n == 0:
            return pair.alpha(0, order)
        first = _times_product(pair.alpha(n, order - n).shift(n), ratio(n), order)
        second = _times_product(pair.alpha(n - 1, order - n + 1).shift(n - 1), ratio(n - 1), order)
        return first - second

    def beta(n: int, order: Fraction) -> PuiseuxSeries:
        return pair.beta(n, order - n).shift(n)

    return BaileyPair.make(a - 1, alpha, beta, f"shift({pair.label})", pair.alpha._D)


def iterate_S1(pair: BaileyPair, times: int) -> BaileyPair:
    for _ in range(times):
        pair = transform_S1(pair)
    return pair


def _contributes(s: PuiseuxSeries) -> bool:
    return not s.is_zero()


def _budget(order: Fraction) -> int:
    return 4 * ceil(order) + 24


def alpha_sum(pair: BaileyPair, order: RationalLike, weighted: bool = False) -> PuiseuxSeries:
    """``sum_n alpha_n`` (or ``sum_n a^n q^(n^2) alpha_n``), stopping after two silent terms."""
    order = frac(order)
    a = pair.a_exp
    total = PuiseuxSeries.zero(order)
    silent = 0
    for n in range(_budget(order)):
        e = n * a + n * n if weighted else 0
        term = pair.alpha(n, order - e).shift(e)
        if _contributes(term):
            total = total + term
            silent = 0
        else:
            silent += 1
            if silent == 2 and n > 1:
                return total
    raise ConvergenceError(f"alpha sum of {pair.label} did not terminate below q^{order}")


def _min_alpha_valuation(pair: BaileyPair, upto: int, order: Fraction) -> Fraction:
    vals = [pair.alpha(k, order).valuation() for k in range(upto + 1) if not pair.alpha(k, order).is_zero()]
    return min(vals, default=order)


def stable_beta(pair: BaileyPair, order: RationalLike) -> tuple[int, PuiseuxSeries]:
    """The limit of ``beta_n`` with a two-sided certificate.

    ``n`` is accepted once ``beta_n`` and ``beta_{n+1}`` agree below ``order``,
    the next two ``alpha`` terms vanish below ``order``, and
    ``n + 1 + min_k val(alpha_k) >= order``.  The last bound covers every
    change a larger ``n`` makes to the denominators ``(q;q)_{n-k}(aq;q)_{n+k}``.
    """
    order = frac(order)
    prev = pair.beta(0, order)
    for n in range(_budget(order)):
        nxt = pair.beta(n + 1, order)
        if series_equal(prev, nxt):
            tail_quiet = all(pair.alpha(m, order).is_zero() for m in (n + 1, n + 2))
            if tail_quiet and n + 1 + _min_alpha_valuation(pair, n, order) >= order:
                return n, prev
        prev = nxt
    raise ConvergenceError(f"beta_n of {pair.label} did not stabilize below q^{order}")


def _aq_infinite(a: Fraction, order: Fraction) -> list:
    return [(1, a + 1 + i, 1) for i in range(max(0, ceil(order - a - 1)))]


@dataclass(frozen=True)
class LimitResult:
    lhs: PuiseuxSeries
    rhs: PuiseuxSeries
    mode: str
    n_star: int | None = None


def bailey_limit(pair: BaileyPair, order: RationalLike, mode: str = "limit") -> LimitResult:
    """Both sides of one of the two limiting identities.

    ``mode="limit"``: ``lim beta_n = sum alpha_n / ((q;q)_inf (aq;q)_inf)``.
    ``mode="lemma"``: ``sum a^n q^(n^2) beta_n = sum a^n q^(n^2) alpha_n / (aq;q)_inf``.
    """
    order = frac(order)
    a = pair.a_exp
    if mode == "limit":
        n_star, lhs = stable_beta(pair, order)
        s = alpha_sum(pair, order)
        den = [(f[0], f[1], -1) for f in _aq_infinite(0, order) + _aq_infinite(a, order)]
        return LimitResult(lhs, _times_product(s, den, order), mode, n_star)
    if mode == "lemma":
        lhs = PuiseuxSeries.zero(order)
        silent = 0
        for n in range(_budget(order)):
            e = n * a + n * n
            term = pair.beta(n, order - e).shift(e)
            if _contributes(term):
                lhs = lhs + term
                silent = 0
            else:
                silent += 1
                if silent == 2:
                    break
        else:
            raise ConvergenceError(f"weighted beta sum of {pair.label} did not terminate below q^{order}")
        s = alpha_sum(pair, order, weighted=True)
        den = [(f[0], f[1], -1) for f in _aq_infinite(a, order)]
        return LimitResult(lhs, _times_product(s, den, order), mode)
    raise DomainError(f"unknown limit mode {mode!r}")


# -- replaying the derivations ---------------------------------------------------------


@dataclass(frozen=True)
class Pipeline:
    """Seed pair, transform chain and the data needed to compare the end results."""

    seed: str
    steps: tuple[str, ...]  # each "S1" or "shift"
    mode: str
    dilation: int
    theta: tuple[Fraction, Fraction]  # (A, B) of sum_{n in Z} (-1)^n q^(A n^2 + B n)
    alpha_factor: tuple[tuple[Fraction, int], ...] = ((Fraction(0), 1),)  # Laurent terms multiplying the alpha sum
    divisor: tuple[tuple[int, Fraction], ...] = ()  # binomials (1 - s q^e) dividing both limit sides


REPLAY_TAGS = ("2.1a", "2.1b", "2.1c", "2.1d", "2.2a", "2.2b", "2.3a", "2.3b", "2.4a", "2.4b")


def _chain(first: int, shift: bool = False, second: int = 0) -> tuple[str, ...]:
    return (("S1",) * first) + (("shift",) if shift else ()) + (("S1",) * second)


def pipeline(tag: str, r: int, j: int | None = None) -> Pipeline:
    """The chain of lemmas that proves the multi-sum identity ``tag``."""
    F = Fraction
    one_minus_root = ((F(0), 1), (F(1, 2), -1))
    if tag in ("2.1b", "2.1d", "2.2b", "2.4b"):
        if j is None or not 1 <= j <= r:
            raise DomainError(f"{tag} needs 1 <= j <= r, got j={j}")
    if tag in ("2.3a", "2.3b") and r < 3:
        raise DomainError(f"{tag} needs r >= 3")
    if r < 2:
        raise DomainError("rank must be at least 2")
    if tag == "2.1a":
        return Pipeline("C1", _chain(r - 1), "limit", 1, (F(4 * r - 1), F(1)))
    if tag == "2.1c":
        return Pipeline("C5", _chain(r - 1), "limit", 1, (F(4 * r - 3), F(1)))
    if tag == "2.1b":
        if j == r:
            return Pipeline("C3", _chain(r - 1), "limit", 1, (F(4 * r - 1), F(2 * r - 1)))
        return Pipeline("C4*", _chain(r - 1 - j, True, j), "limit", 1, (F(4 * r - 1), F(4 * r - 2 * j - 1)))
    if tag == "2.1d":
        if j == r:
            return Pipeline("C6", _chain(r - 1), "limit", 1, (F(4 * r - 3), F(2 * r - 3)))
        return Pipeline("C7*", _chain(r - 1 - j, True, j), "limit", 1, (F(4 * r - 3), F(4 * r - 2 * j - 3)))
    if tag == "2.2a":
        return Pipeline("G5", _chain(r - 1), "limit", 2, (r - F(3, 4), r - F(5, 4)), one_minus_root)
    if tag == "2.2b":
        if j == r:
            return Pipeline("G4*", _chain(r - 1), "limit", 2, (r - F(3, 4), F(-3, 4)))
        return Pipeline("G4**", _chain(r - 1 - j, True, j), "limit", 2, (r - F(3, 4), r - j - F(3, 4)))
    if tag == "2.3a":
        return Pipeline("W1", _chain(r - 2), "lemma", 1, (F(4 * r - 1), F(3)))
    if tag == "2.3b":
        return Pipeline(
            "W2", _chain(r - 2), "lemma", 1, (r - F(1, 4), r - F(7, 4)),
            one_minus_root, ((-1, F(1, 2)),),
        )
    if tag == "2.4a":
        return Pipeline("G2", _chain(r - 1), "limit", 2, (r - F(1, 4), r - F(3, 4)), one_minus_root)
    if tag == "2.4b":
        if j == r:
            return Pipeline("G1", _chain(r - 1), "limit", 2, (r - F(1, 4), F(-1, 4)))
        return Pipeline("G1*", _chain(r - 1 - j, True, j), "limit", 2, (r - F(1, 4), r - j - F(1, 4)))
    raise DomainError(f"no derivation recorded for {tag!r}; expected one of {REPLAY_TAGS}")


def run_chain(seed: BaileyPair, steps: Sequence[str]) -> BaileyPair:
    pair = seed
    for step in steps:
        pair = transform_S1(pair) if step == "S1" else transform_shift(pair)
    return pair


@dataclass(frozen=True)
class ReplayReport:
    """Per-stage outcome of :func:`replay_derivation`; truthy iff every stage agrees."""

    tag: str
    r: int
    j: int | None
    order: Fraction
    stages: tuple[tuple[str, Comparison], ...]

    @property
    def ok(self) -> bool:
        return all(c.equal for _, c in self.stages)

    def __bool__(self) -> bool:
        return self.ok

    def first_failure(self) -> tuple[int, str, Comparison] | None:
        for i, (name, c) in enumerate(self.stages):
            if not c.equal:
                return i, name, c
        return None

    def describe(self) -> str:
        head = f"{self.tag} r={self.r}" + (f" j={self.j}" if self.j is not None else "")
        bad = self.first_failure()
        if bad is None:
            return f"{head}: all {len(self.stages)} stages agree below q^{self.order}"
        i, name, c = bad
        return f"{head}: stage {i} ({name}) fails: {c.describe()}"


def replay_derivation(tag: str, r: int, j: int | None = None, order: RationalLike = 40) -> ReplayReport:
    """Run seed pair -> lemma chain -> limit -> theta product and compare every stage.

    Stages: the two limit sides agree; the limit equals the multi-sum from
    :func:`eval_descending`; the alpha side equals the product from
    :func:`rhs_builder`; the alpha sum equals its triple-product closed form.
    Sums in ``q^2`` are computed in ``q`` to half the order and then dilated.
    """
    order = frac(order)
    p = pipeline(tag, r, j)
    inner = order / p.dilation
    pair = run_chain(catalogue(p.seed), p.steps)
    lim = bailey_limit(pair, inner, p.mode)

    def normalize(side: PuiseuxSeries) -> PuiseuxSeries:
        factors = [(s, e, -1) for s, e in p.divisor]
        if p.mode == "limit":
            # lim beta_n carries 1/(q;q)_inf from the (q;q)_{n-k} denominators
            factors += [(1, k, 1) for k in range(1, ceil(inner) + 1)]
        return _times_product(side, factors, inner).dilate(p.dilation)

    lhs_sum = normalize(lim.lhs)
    rhs_sum = normalize(lim.rhs)
    desc = eval_descending(DescendingSumSpec(tag, r, j if tag in ("2.1b", "2.1d", "2.2b", "2.4b") else None), order)
    product = rhs_builder(tag, r, j, order)

    s = alpha_sum(pair, inner, weighted=(p.mode == "lemma"))
    s = s * _laurent(p.alpha_factor, inner)
    A, B = p.theta
    theta = jacobi_triple_product(B, 1, 2 * A, inner)
    stages = (
        ("limit sides", series_equal(lim.lhs, lim.rhs)),
        ("multi-sum", series_equal(lhs_sum, desc)),
        ("product", series_equal(rhs_sum, product)),
        ("triple product", series_equal(s, theta)),
    )
    return ReplayReport(tag, r, j, order, stages)
