"""Generalized Nahm sums: the rank-r families, exact expansion, numeric evaluation.

A generalized Nahm sum with data ``(A, b, c, d)`` is

    sum_{n in N^r} q^(n^T A D n / 2 + n^T b + c) / prod_i (q^d_i; q^d_i)_{n_i}

with ``D = diag(d)`` and ``A D`` symmetric positive definite.  The signed
variant carries an extra ``(-1)^{n_k}`` for one coordinate ``k``.

Exact expansion enumerates lattice points depth-first.  Each prefix keeps the
running product of inverse Pochhammer symbols as a dense integer list, so
stepping ``n_i -> n_i + 1`` costs one pass dividing by ``1 - q^(d_i n_i)``.
Pruning uses a floating lower bound for the exponent over all real
completions of the prefix; every surviving leaf is re-checked exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations_with_replacement
from math import ceil, floor, isqrt, lcm
from typing import Callable, Iterator, Mapping, Sequence

import numpy as np

from .series import (
    PuiseuxSeries,
    RationalLike,
    SeriesError,
    frac,
    pochhammer_factors,
    q_product,
)

FAMILIES = ("T1.1-1", "T1.1-2", "T1.2", "T1.3")
DESCENDING_TAGS = ("2.1a", "2.1b", "2.1c", "2.1d", "2.2a", "2.2b", "2.3a", "2.3b", "2.4a", "2.4b")
# Relative widening of the float pruning region; exactness never depends on it.
SAFETY = 1.1


class DomainError(ValueError):
    """Parameters outside the range where an object is defined."""


def _fmt(x: Fraction) -> str:
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class NahmSpec:
    """Data ``(A, b, c, d)`` of a generalized Nahm sum, plus an optional sign coordinate.

    ``sign_coord`` is 1-based: ``sign_coord = k`` multiplies each term by ``(-1)^{n_k}``.
    """

    r: int
    A: tuple[tuple[Fraction, ...], ...]
    b: tuple[Fraction, ...]
    c: Fraction
    d: tuple[int, ...]
    sign_coord: int | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self) -> None:
        if self.r < 1:
            raise DomainError("rank must be at least 1")
        if len(self.A) != self.r or any(len(row) != self.r for row in self.A):
            raise DomainError("A must be r x r")
        if len(self.b) != self.r or len(self.d) != self.r:
            raise DomainError("b and d must have length r")
        if any(int(x) != x or x < 1 for x in self.d):
            raise DomainError("d entries must be positive integers")
        if self.sign_coord is not None and not 1 <= self.sign_coord <= self.r:
            raise DomainError("sign_coord must be a coordinate index in 1..r")

    @classmethod
    def make(
        cls,
        A: Sequence[Sequence[RationalLike]],
        b: Sequence[RationalLike],
        c: RationalLike,
        d: Sequence[int],
        sign_coord: int | None = None,
        label: str = "",
    ) -> "NahmSpec":
        return cls(
            len(A),
            tuple(tuple(frac(x) for x in row) for row in A),
            tuple(frac(x) for x in b),
            frac(c),
            tuple(int(x) for x in d),
            sign_coord,
            label,
        )

    @property
    def AD(self) -> tuple[tuple[Fraction, ...], ...]:
        return tuple(tuple(self.A[i][k] * self.d[k] for k in range(self.r)) for i in range(self.r))

    def exponent(self, n: Sequence[int], include_c: bool = False) -> Fraction:
        """``n^T A D n / 2 + n^T b (+ c)`` evaluated exactly."""
        M = self.AD
        r = self.r
        e = sum(M[i][k] * n[i] * n[k] for i in range(r) for k in range(r)) / 2
        e += sum(self.b[i] * n[i] for i in range(r))
        return e + self.c if include_c else e

    def with_(self, **changes) -> "NahmSpec":
        data = {
            "r": self.r,
            "A": self.A,
            "b": self.b,
            "c": self.c,
            "d": self.d,
            "sign_coord": self.sign_coord,
            "label": self.label,
        }
        for key, value in changes.items():
            if key == "b":
                value = tuple(frac(x) for x in value)
            elif key == "c":
                value = frac(value)
            data[key] = value
        return NahmSpec(**data)

    def to_json(self) -> dict:
        return {
            "r": self.r,
            "A": [[_fmt(x) for x in row] for row in self.A],
            "b": [_fmt(x) for x in self.b],
            "c": _fmt(self.c),
            "d": list(self.d),
            "sign_coord": self.sign_coord,
        }

    @classmethod
    def from_json(cls, data: Mapping) -> "NahmSpec":
        try:
            return cls.make(
                data["A"], data["b"], data.get("c", 0), data["d"], data.get("sign_coord"), data.get("label", "")
            )
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"malformed Nahm spec: {exc}") from exc


# -- families ----------------------------------------------------------------------


def _family_matrix(family: str, r: int) -> list[list[Fraction]]:
    """Matrix A of the four rank-r families (1-based formulas, 0-based storage)."""
    A = [[Fraction(0)] * r for _ in range(r)]
    mid = range(1, r - 1)  # rows/cols 2..r-1 in 1-based terms
    for i in mid:
        for k in mid:
            A[i][k] = Fraction(2 * min(i, k))
    last = r - 1
    if family in ("T1.1-1", "T1.1-2"):
        A[0][0] = Fraction(1)
        A[0][last] = Fraction(1)
        for i in mid:
            A[i][last] = Fraction(2 * i)
            A[last][i] = Fraction(i)
        A[last][0] = Fraction(1, 2)
        A[last][last] = Fraction(r - 1) if family == "T1.1-1" else Fraction(2 * r - 1, 2)
    else:
        A[0][0] = Fraction(1)
        A[0][last] = Fraction(1, 2)
        for i in mid:
            A[i][last] = Fraction(i)
            A[last][i] = Fraction(2 * i)
        A[last][0] = Fraction(1)
        A[last][last] = Fraction(r - 1) if family == "T1.2" else Fraction(2 * r - 1, 2)
    return A


def _family_b(family: str, r: int, j: int) -> list[Fraction]:
    if family in ("T1.1-1", "T1.1-2"):
        if j == 0:
            b = [Fraction(0)] * r
            if family == "T1.1-2":
                b[-1] = Fraction(-1, 2)
            return b
        b = [Fraction(0)] * r
        b[0] = Fraction(1)
        # positions j+1..r-1 (1-based) carry 2, 4, ..., 2(r-1-j)
        for pos in range(j + 1, r):
            b[pos - 1] = Fraction(2 * (pos - j))
        b[-1] = Fraction(r - j) if family == "T1.1-1" else Fraction(r - j - 1)
        if r == 1:
            raise DomainError("rank must be at least 2")
        return b
    if j == 0:
        return [Fraction(1)] + [Fraction(i) for i in range(1, r)]
    b = [Fraction(0)] * r
    if family == "T1.2":
        for pos in range(j + 1, r + 1):
            b[pos - 1] = Fraction(pos - j)
        return b
    for pos in range(j + 1, r):
        b[pos - 1] = Fraction(pos - j)
    # the last entry is r-j-1 taken literally, which is -1 at j = r
    b[-1] = Fraction(r - j - 1)
    return b


def _family_c(family: str, r: int, j: int) -> Fraction:
    if family == "T1.1-1":
        return Fraction(5 - 4 * r, 32 * r - 8) if j == 0 else Fraction((4 * r - 4 * j - 1) ** 2, 32 * r - 8)
    if family == "T1.1-2":
        return Fraction(7 - 4 * r, 32 * r - 24) if j == 0 else Fraction((4 * r - 4 * j - 3) ** 2, 32 * r - 24)
    if family == "T1.2":
        if j == 0:
            return Fraction(8 * r * r - 14 * r + 5, 32 * r - 8)
        return Fraction(8 * (r - j) ** 2 + 4 * j - 6 * r + 1, 32 * r - 8)
    if j == 0:
        return Fraction(4 * r * r - 11 * r + 7, 16 * r - 12)
    return Fraction(4 * (r - j) ** 2 + 6 * j - 7 * r + 3, 16 * r - 12)


def build_family(family: str, r: int, j: int) -> NahmSpec:
    """The quadruple ``(A, b_j, c_j, d)`` of one of the four rank-r families."""
    if family not in FAMILIES:
        raise DomainError(f"unknown family {family!r}; expected one of {FAMILIES}")
    if r < 2 or not 0 <= j <= r:
        raise DomainError(f"need r >= 2 and 0 <= j <= r, got r={r}, j={j}")
    d = (2,) * (r - 1) + (1,) if family.startswith("T1.1") else (1,) * (r - 1) + (2,)
    return NahmSpec(
        r,
        tuple(tuple(row) for row in _family_matrix(family, r)),
        tuple(_family_b(family, r, j)),
        _family_c(family, r, j),
        d,
        r if family == "T1.3" else None,
        f"{family}:r={r}:j={j}",
    )


def build_capparelli() -> NahmSpec:
    return NahmSpec.make([[4, 2], [6, 4]], [0, 0], Fraction(-1, 24), [1, 3], label="capparelli")


def build_sumC(r: int) -> tuple[NahmSpec, NahmSpec, Fraction]:
    """The two sums of the rank-r split identity and the shift of the second one."""
    if r < 3:
        raise DomainError(f"the split identity needs r >= 3, got {r}")
    base = build_family("T1.1-1", r, 0)
    b1 = [0] * (r - 1) + [1]
    b2 = [1] + [2 * i for i in range(1, r - 1)] + [r]
    s1 = base.with_(b=b1, c=0, label=f"sumC-1:r={r}")
    s2 = base.with_(b=b2, c=0, label=f"sumC-2:r={r}")
    return s1, s2, Fraction(r - 3, 2)


def sumC_constants(r: int) -> tuple[Fraction, Fraction]:
    """The ``c`` values that make the two split sums modular (used for numerics)."""
    return Fraction(37 - 4 * r, 32 * r - 8), Fraction((4 * r - 7) ** 2, 32 * r - 8)


def wang_exponent(r: int, j: int | None = None) -> Callable[[Sequence[int]], Fraction]:
    """Exponent of the Wang sums written in tail sums ``N_k = n_{k+1} + ... + n_r``.

    ``j=None`` selects the first sum (linear part ``n_1 + N_1 + ... + N_{r-1}``);
    otherwise the linear part is ``N_j + ... + N_{r-1}``.
    """
    if r < 2 or (j is not None and not 1 <= j <= r):
        raise DomainError(f"need r >= 2 and 1 <= j <= r, got r={r}, j={j}")

    def exponent(n: Sequence[int]) -> Fraction:
        N = [sum(n[k:]) for k in range(r)]  # N[k] = n_{k+1} + ... + n_r
        e = Fraction(n[0] ** 2, 2) + n[0] * N[r - 1] + sum(N[k] ** 2 for k in range(1, r))
        if j is None:
            return e + n[0] + sum(N[1:r])
        return e + sum(N[j:r])

    return exponent


def build_wang(r: int, j: int | None = None) -> NahmSpec:
    """The Wang sums as Nahm specs with symmetrizer ``(1, ..., 1, 2)``."""
    label = f"wang-1:r={r}" if j is None else f"wang-2:r={r}:j={j}"
    return spec_from_quadratic(r, wang_exponent(r, j), (1,) * (r - 1) + (2,), label=label)


def completed_square(family: str, n: Sequence[int]) -> Fraction:
    """``n^T A D n / 2`` for the ``T1.1`` families written as a sum of squares."""
    r = len(n)
    total = Fraction(n[0] ** 2 + n[0] * n[-1])
    half = Fraction(n[-1], 2)
    total += 2 * sum((sum(n[i : r - 1]) + half) ** 2 for i in range(1, r - 1))
    total += 2 * half**2
    if family == "T1.1-2":
        total += Fraction(n[-1] ** 2, 4)
    elif family != "T1.1-1":
        raise DomainError(f"no completed-square form for {family!r}")
    return total


def parse_builtin(name: str) -> NahmSpec:
    """Parse ``capparelli`` or ``FAMILY:r=R:j=J`` (e.g. ``T1.2:r=2:j=1``)."""
    if name.lower() == "capparelli":
        return build_capparelli()
    parts = name.split(":")
    if len(parts) != 3 or parts[0] not in FAMILIES:
        raise DomainError(f"cannot parse builtin {name!r}")
    try:
        kv = dict(p.split("=", 1) for p in parts[1:])
        return build_family(parts[0], int(kv["r"]), int(kv["j"]))
    except (KeyError, ValueError) as exc:
        raise DomainError(f"cannot parse builtin {name!r}") from exc


def spec_from_quadratic(
    r: int,
    exponent: Callable[[Sequence[int]], Fraction],
    d: Sequence[int],
    sign_coord: int | None = None,
    label: str = "",
) -> NahmSpec:
    """Recover ``(A, b)`` from a quadratic exponent polynomial by finite differences.

    ``A`` is taken as ``M D^{-1}`` where ``M`` is the Hessian, so that
    ``A D`` reproduces the quadratic part.
    """
    zero = [0] * r
    c0 = frac(exponent(zero))

    def unit(*idx: int) -> list[int]:
        v = [0] * r
        for i in idx:
            v[i] += 1
        return v

    M = [[Fraction(0)] * r for _ in range(r)]
    b = [Fraction(0)] * r
    for i in range(r):
        e1 = frac(exponent(unit(i))) - c0
        e2 = frac(exponent(unit(i, i))) - c0
        M[i][i] = e2 - 2 * e1
        b[i] = e1 - M[i][i] / 2
    for i, k in combinations_with_replacement(range(r), 2):
        if i == k:
            continue
        eik = frac(exponent(unit(i, k))) - c0
        M[i][k] = M[k][i] = eik - (M[i][i] / 2 + b[i]) - (M[k][k] / 2 + b[k])
    A = [[M[i][k] / d[k] for k in range(r)] for i in range(r)]
    return NahmSpec.make(A, b, c0, d, sign_coord, label)


# -- validation --------------------------------------------------------------------


def leading_minors(M: Sequence[Sequence[Fraction]]) -> list[Fraction]:
    """Leading principal minors by fraction-exact elimination."""
    n = len(M)
    W = [list(map(Fraction, row)) for row in M]
    minors: list[Fraction] = []
    det = Fraction(1)
    for k in range(n):
        piv = W[k][k]
        if piv == 0:
            # later minors need the full determinant; fall back to cofactor-free pivoting
            minors.append(Fraction(0))
            minors.extend(_det_exact([row[: m + 1] for row in M[: m + 1]]) for m in range(k + 1, n))
            return minors
        det *= piv
        minors.append(det)
        for i in range(k + 1, n):
            f = W[i][k] / piv
            if f:
                for m in range(k, n):
                    W[i][m] -= f * W[k][m]
    return minors


def _det_exact(M: Sequence[Sequence[Fraction]]) -> Fraction:
    n = len(M)
    W = [list(map(Fraction, row)) for row in M]
    det = Fraction(1)
    for k in range(n):
        p = next((i for i in range(k, n) if W[i][k] != 0), None)
        if p is None:
            return Fraction(0)
        if p != k:
            W[k], W[p] = W[p], W[k]
            det = -det
        det *= W[k][k]
        for i in range(k + 1, n):
            f = W[i][k] / W[k][k]
            for m in range(k, n):
                W[i][m] -= f * W[k][m]
    return det


def validate_symmetrizable(spec: NahmSpec) -> bool:
    """True iff ``A D`` is exactly symmetric and positive definite."""
    M = spec.AD
    r = spec.r
    if any(M[i][k] != M[k][i] for i in range(r) for k in range(i + 1, r)):
        return False
    return all(m > 0 for m in leading_minors(M))


# -- exact expansion ------------------------------------------------------------------


class _Enumerator:
    """Shared float pruning data for a positive definite quadratic exponent."""

    def __init__(self, spec: NahmSpec, constant: Fraction):
        r = spec.r
        M = spec.AD
        self.r = r
        self.Mf = [[float(M[i][k]) for k in range(r)] for i in range(r)]
        self.bf = [float(x) for x in spec.b]
        self.cf = float(constant)
        Mn = np.array(self.Mf)
        # W[i] inverts the trailing block on coordinates i..r-1
        self.W = [np.linalg.inv(Mn[i:, i:]).tolist() for i in range(r)] + [[]]

    def bound(self, depth: int, e_prefix: float, lin: Sequence[float]) -> float:
        """Minimum over real completions of coordinates ``depth..r-1``."""
        W = self.W[depth]
        if not W:
            return e_prefix
        g = lin[depth:]
        m = len(g)
        quad = 0.0
        for a in range(m):
            ga = g[a]
            if ga:
                row = W[a]
                s = 0.0
                for c in range(m):
                    s += row[c] * g[c]
                quad += ga * s
        return e_prefix - 0.5 * quad

    def root_bound(self) -> float:
        return self.bound(0, self.cf, self.bf)


def _exponent_denominator(spec: NahmSpec, constant: Fraction) -> int:
    M = spec.AD
    D = constant.denominator
    for i in range(spec.r):
        D = lcm(D, (M[i][i] / 2).denominator, spec.b[i].denominator)
        for k in range(i + 1, spec.r):
            D = lcm(D, M[i][k].denominator)
    return D


def eval_nahm(
    spec: NahmSpec,
    order: RationalLike,
    include_c: bool = False,
    slack: int = 0,
) -> PuiseuxSeries:
    """Exact expansion of the (signed) generalized Nahm sum below ``order``.

    ``slack > 0`` keeps each coordinate loop running that many steps past the
    pruning point and disables prefix-based truncation; it exists so tests can
    confirm that pruning never drops a term.
    """
    if not validate_symmetrizable(spec):
        raise DomainError("A D must be symmetric positive definite")
    order = frac(order)
    constant = spec.c if include_c else Fraction(0)
    D = _exponent_denominator(spec, constant)
    lim = ceil(order * D)
    r = spec.r
    M = spec.AD
    # integer data for E(n) * D
    hdiag = [int(M[i][i] * D / 2) for i in range(r)]
    cross = [[int(M[i][k] * D) for k in range(r)] for i in range(r)]
    blin = [int(spec.b[i] * D) for i in range(r)]
    cint = int(constant * D)
    steps = [spec.d[i] * D for i in range(r)]
    sign_idx = spec.sign_coord - 1 if spec.sign_coord is not None else -1

    en = _Enumerator(spec, constant)
    root = en.root_bound()
    offset = floor((root - 1e-7) * D)
    if offset >= lim:
        return PuiseuxSeries.zero(order, D)
    acc = [0] * (lim - offset)
    limit_f = float(order) + (SAFETY - 1) * max(abs(float(order)), 1.0)
    full_len = lim - offset

    def needed(lb: float) -> int:
        if slack:
            return full_len
        return max(0, min(full_len, lim - floor((lb - 1e-7) * D)))

    n = [0] * r
    lin = list(en.bf)  # b_k + sum_{fixed i} M_ki n_i

    def rec(depth: int, P: list[int], e_int: int, parity: int) -> None:
        cur = P[:]
        prev = None
        past = 0
        v = 0
        step = steps[depth]
        Mrow = en.Mf
        while True:
            if v:
                # divide the running product by (1 - q^(d_i v))
                x = step * v
                for k in range(x, len(cur)):
                    if cur[k - x]:
                        cur[k] += cur[k - x]
            n[depth] = v
            # exact exponent numerator for the extended prefix
            de = hdiag[depth] * v * v + blin[depth] * v
            for i in range(depth):
                if n[i]:
                    de += cross[i][depth] * n[i] * v
            e_new = e_int + de
            for k in range(r):
                lin[k] += Mrow[k][depth] * v
            lb = en.bound(depth + 1, e_new / D, lin)
            # the bound is convex in v: once above the limit and rising, it stays above
            if past or (lb > limit_f and prev is not None and lb >= prev):
                past += 1
                if past > slack:
                    for k in range(r):
                        lin[k] -= Mrow[k][depth] * v
                    break
            par = parity ^ (v & 1 if depth == sign_idx else 0)
            if lb <= limit_f or past:
                if depth == r - 1:
                    if e_new < lim:
                        span = lim - e_new
                        if span > len(cur):
                            raise RuntimeError("internal: truncated prefix product is too short")
                        base = e_new - offset
                        if par:
                            for t in range(span):
                                c = cur[t]
                                if c:
                                    acc[base + t] -= c
                        else:
                            for t in range(span):
                                c = cur[t]
                                if c:
                                    acc[base + t] += c
                else:
                    rec(depth + 1, cur[: needed(lb)], e_new, par)
            for k in range(r):
                lin[k] -= Mrow[k][depth] * v
            prev = lb
            v += 1
        n[depth] = 0

    start = [0] * needed(root)
    if start:
        start[0] = 1
    rec(0, start, cint, 0)
    return PuiseuxSeries.from_dense(D, offset, acc, order)


# -- numeric evaluation ------------------------------------------------------------


@dataclass(frozen=True)
class NumericValue:
    value: complex
    tail: float

    def __complex__(self) -> complex:
        return self.value


def eval_nahm_numeric(
    spec: NahmSpec,
    q: complex | None = None,
    n_cap: int = 60,
    *,
    tau: complex | None = None,
    tol: float = 1e-17,
    include_c: bool = True,
) -> NumericValue:
    """Floating value of the sum including the ``q^c`` prefactor.

    Give either ``q`` (fractional powers use the principal logarithm) or
    ``tau`` (powers are ``exp(2 pi i alpha tau)``, which is the branch the
    modular transformation laws are stated in).
    """
    if tau is not None:
        tau = complex(tau)
        if tau.imag <= 0:
            raise DomainError("tau must lie in the upper half plane")
        logq = 2j * math.pi * tau
    else:
        if q is None:
            raise DomainError("give q or tau")
        q = complex(q)
        if abs(q) >= 1:
            raise DomainError("|q| must be < 1")
        if q == 0:
            return NumericValue(1.0 + 0j if not include_c or spec.c == 0 else 0j, 0.0)
        logq = cmath.log(q)
    if not validate_symmetrizable(spec):
        raise DomainError("A D must be symmetric positive definite")
    rho = -logq.real  # |q| = exp(-rho)
    cut = math.log(1 / tol) / rho
    r = spec.r
    en = _Enumerator(spec, Fraction(0))
    Mf = en.Mf
    qd = [cmath.exp(logq * d) for d in spec.d]
    sign_idx = spec.sign_coord - 1 if spec.sign_coord is not None else -1
    n = [0] * r
    lin = list(en.bf)
    total = 0j
    capped = [math.inf]

    def rec(depth: int, e_val: float, weight: complex, parity: int) -> complex:
        s = 0j
        prev = None
        v = 0
        w = weight
        while v <= n_cap:
            if v:
                w = w / (1 - qd[depth] ** v)
            n[depth] = v
            de = 0.5 * Mf[depth][depth] * v * v + en.bf[depth] * v
            for i in range(depth):
                de += Mf[i][depth] * n[i] * v
            e_new = e_val + de
            for k in range(r):
                lin[k] += Mf[k][depth] * v
            lb = en.bound(depth + 1, e_new, lin)
            par = parity ^ (v & 1 if depth == sign_idx else 0)
            if lb <= cut:
                if depth == r - 1:
                    term = w * cmath.exp(logq * e_new)
                    s += -term if par else term
                else:
                    s += rec(depth + 1, e_new, w, par)
            for k in range(r):
                lin[k] -= Mf[k][depth] * v
            if lb > cut and prev is not None and lb >= prev:
                break
            prev = lb
            v += 1
        else:
            capped[0] = min(capped[0], prev if prev is not None else 0.0)
        n[depth] = 0
        return s

    total = rec(0, 0.0, 1 + 0j, 0)
    pref = cmath.exp(logq * float(spec.c)) if include_c else 1
    # crude a-posteriori tail: size of the first omitted shell
    qa = math.exp(-rho)
    denom = 1.0
    for d in spec.d:
        for k in range(1, 200):
            denom *= 1 - qa ** (d * k)
    edge = min(cut, capped[0])
    tail = math.exp(-rho * edge) / denom * abs(pref)
    return NumericValue(total * pref, tail)


# -- descending multi-sums ----------------------------------------------------------


@dataclass(frozen=True)
class DescendingSumSpec:
    family: str
    r: int
    j: int | None = None

    def __post_init__(self) -> None:
        if self.family not in DESCENDING_TAGS:
            raise DomainError(f"unknown descending family {self.family!r}")
        lo = 3 if self.family.startswith("2.3") else 2
        if self.r < lo:
            raise DomainError(f"{self.family} needs r >= {lo}")
        if self.family in ("2.1b", "2.1d", "2.2b", "2.4b"):
            if self.j is None or not 1 <= self.j <= self.r:
                raise DomainError(f"{self.family} needs 1 <= j <= r")


def _descending_tuples(m: int, nmax: int) -> Iterator[tuple[int, ...]]:
    """All ``N_1 >= ... >= N_m >= 0`` with ``N_1 <= nmax``."""
    if m == 0:
        yield ()
        return

    def rec(prefix: list[int], upper: int) -> Iterator[tuple[int, ...]]:
        if len(prefix) == m:
            yield tuple(prefix)
            return
        for v in range(upper + 1):
            prefix.append(v)
            yield from rec(prefix, v)
            prefix.pop()

    yield from rec([], nmax)


def _descending_term(spec: DescendingSumSpec, N: tuple[int, ...], order: Fraction):
    """Return (min exponent, thunk building the term) for one index tuple."""
    fam, r, j = spec.family, spec.r, spec.j
    m = r - 1
    last = N[-1]
    S2 = sum(x * x for x in N)
    S1 = sum(N)
    diffs = [N[i] - N[i + 1] for i in range(m - 1)]
    sign = 1
    poly: list[tuple[Fraction, int]] = [(Fraction(0), 1)]
    if fam.startswith("2.2") or fam.startswith("2.4"):
        den = [f for x in diffs for f in pochhammer_factors(2, 1, 2, x)]
        den += pochhammer_factors(4, 1, 4, last)
    elif fam == "2.3b":
        den = [f for x in diffs for f in pochhammer_factors(1, 1, 1, x)]
    else:
        den = [f for x in diffs for f in pochhammer_factors(1, 1, 1, x)]
        den += pochhammer_factors(1, 1, 1, last)

    tailj = sum(N[i] for i in range(j - 1, m)) if j is not None else 0
    headj = sum(N[i] for i in range(0, j - 1)) if j is not None else 0
    if fam == "2.1a":
        e = S2
        den += pochhammer_factors(1, 1, 2, last)
    elif fam == "2.1b":
        e = S2 + headj + 2 * tailj
        den += pochhammer_factors(3, 1, 2, last)
    elif fam == "2.1c":
        e = S2 + last * (last - 1) // 2
        den += pochhammer_factors(1, 1, 2, last)
    elif fam == "2.1d":
        e = S2 + headj + 2 * tailj + last * (last - 1) // 2
        den += pochhammer_factors(3, 1, 2, last)
    elif fam == "2.2a":
        e = 2 * (S2 + S1) + last * last
        sign = -1 if last % 2 else 1
        den += pochhammer_factors(3, -1, 2, last)
    elif fam == "2.2b":
        e = 2 * (S2 + tailj) + last * last - 2 * last
        sign = -1 if last % 2 else 1
        den += pochhammer_factors(1, -1, 2, last)
    elif fam == "2.3a":
        e = S2 + last
        poly = [(Fraction(0), 1), (Fraction(-1), 1), (Fraction(last - 1), -1)]
        den += pochhammer_factors(1, 1, 2, last)
    elif fam == "2.3b":
        e = S2 + sum(N[: m - 1]) + 2 * last
        poly = [(Fraction(0), 1), (Fraction(1), 1), (Fraction(2 * last + 1, 2), 1)]
        den += pochhammer_factors(Fraction(1, 2), -1, 1, last + 1)
        den += pochhammer_factors(2, 1, 2, last)
    elif fam == "2.4a":
        e = 2 * (S2 + S1)
        den += pochhammer_factors(3, -1, 2, last)
    else:  # 2.4b
        e = 2 * (S2 + tailj)
        den += pochhammer_factors(1, -1, 2, last)

    e = Fraction(e)
    pmin = min(p for p, _ in poly)

    def build() -> PuiseuxSeries:
        factors = [(s, x, -p) for s, x, p in den]
        total = None
        for pe, pc in poly:
            shift = e + pe
            if shift >= order:
                continue
            base = q_product(factors, order - shift).shift(shift).scale(sign * pc)
            total = base if total is None else total + base
        return total if total is not None else PuiseuxSeries.zero(order)

    return e + pmin, build


def eval_descending(spec: DescendingSumSpec, order: RationalLike, extra: int = 0) -> PuiseuxSeries:
    """Exact expansion of a descending multi-sum ``N_1 >= ... >= N_{r-1} >= 0``.

    Every family's exponent is at least ``N_1^2 - 1``, which bounds ``N_1``.
    ``extra`` widens that bound for completeness checks.
    """
    order = frac(order)
    nmax = isqrt(max(0, ceil(order) + 1)) + 1 + extra
    total = PuiseuxSeries.zero(order)
    for N in _descending_tuples(spec.r - 1, nmax):
        emin, build = _descending_term(spec, N, order)
        if emin >= order:
            continue
        total = total + build()
    return total
