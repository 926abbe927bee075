"""Numeric evaluation of the vector-valued functions G, H and their transformation laws.

Components are evaluated from their product formulas in a private mpmath
context whose precision grows with ``1/Im tau``, so points close to a cusp
(needed for the group composites) still resolve to double precision.
Fractional powers ``q^alpha`` are always ``exp(2 pi i alpha tau)``.
Residuals are ``max|lhs - rhs| / max(1, max|rhs|)``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable

import mpmath
import numpy as np

from .nahm import DomainError, NumericValue, build_family, eval_nahm_numeric

__all__ = [
    "FAMILIES",
    "MIN_IM",
    "ComplexPoint",
    "TransformReport",
    "block_matrices",
    "build_S",
    "build_S_tilde",
    "check_dual_transform",
    "check_eta_weber_laws",
    "check_group_composites",
    "check_lemma_ww",
    "check_remark_identities",
    "check_translations",
    "check_wakimoto",
    "component_vector",
    "dimension",
    "eval_component",
    "eval_eta_weber",
    "eval_theta_numeric",
    "phase_matrix_residual",
    "translation_matrices",
    "ww_delta",
    "ww_epsilon",
]

FAMILIES = ("G", "H")
MIN_IM = 0.005
_GUARD_DIGITS = 18


@dataclass(frozen=True)
class ComplexPoint:
    tau: complex

    def __post_init__(self) -> None:
        if complex(self.tau).imag <= 0:
            raise DomainError(f"tau must lie in the upper half plane, got {self.tau}")

    @property
    def q(self) -> complex:
        return complex(np.exp(2j * np.pi * self.tau))

    @property
    def q_half(self) -> complex:
        return complex(np.exp(1j * np.pi * self.tau))


def dimension(family: str, r: int) -> int:
    _check(family, r)
    return 2 * r - 1 if family == "G" else 2 * r - 2


def _check(family: str, r: int) -> None:
    if family not in FAMILIES:
        raise DomainError(f"family must be one of {FAMILIES}, got {family!r}")
    if r < 2:
        raise DomainError(f"rank must be >= 2, got {r}")


# -- evaluation engine -----------------------------------------------------------------


class _Evaluator:
    """Products and powers at one ``tau`` in a private precision context."""

    def __init__(self, tau: complex, terms: int | None = None) -> None:
        tau = complex(tau)
        if tau.imag < MIN_IM:
            raise DomainError(f"Im tau = {tau.imag:.3g} is below {MIN_IM}; the products do not resolve")
        if terms is not None and terms < 100:
            raise DomainError(f"terms must be >= 100, got {terms}")
        ctx = mpmath.MPContext()
        # largest factor magnitude is about exp(pi / (6 Im tau)) for the half-argument products
        ctx.dps = _GUARD_DIGITS + math.ceil(math.pi / (6 * tau.imag) / math.log(10))
        self.ctx = ctx
        self.tau = ctx.mpc(tau.real, tau.imag)
        self.eps = ctx.mpf(10) ** (-ctx.dps)
        self.terms = terms
        self.tail = 0.0
        self.ipi = ctx.mpc(0, ctx.pi)
        self.lq = 2 * self.ipi * self.tau  # log q
        self.lh = self.ipi * self.tau  # log q^(1/2)
        self._memo: dict = {}

    def power(self, alpha: Fraction, log_base) -> object:
        return self.ctx.exp(self.ctx.mpf(alpha.numerator) / alpha.denominator * log_base)

    def poch(self, log_a, log_b) -> object:
        """``(a; b)_inf`` from the logarithms of ``a`` and ``b``."""
        key = (complex(log_a), complex(log_b))
        if key in self._memo:
            return self._memo[key]
        ctx = self.ctx
        x, b = ctx.exp(log_a), ctx.exp(log_b)
        ab = abs(b)
        p = ctx.mpf(1)
        n = 0
        while True:
            p *= 1 - x
            x *= b
            n += 1
            if abs(x) < self.eps:
                break
            if self.terms is not None and n >= self.terms:
                self.tail = max(self.tail, float(abs(x) / (1 - ab)))
                break
        self._memo[key] = p
        return p

    def triple(self, logs, log_b) -> object:
        out = self.ctx.mpf(1)
        for la in logs:
            out *= self.poch(la, log_b)
        return out


def _gv(E: _Evaluator, r: int, j: int):
    L, ipi = E.lq, E.ipi
    e2 = Fraction((4 * r - 4 * j + 1) ** 2, 32 * r - 8)
    e1 = e2 + Fraction(2 * j - r - 1, 2)
    M, K = 16 * r - 4, 4 * r - 1
    V = E.power(e1, L) * E.triple([(8 * r - 4 * j) * L, (8 * r + 4 * j - 4) * L, M * L], M * L) / E.triple(
        [L, 3 * L, 4 * L], 4 * L
    )
    Vs = E.power(e2, L) * E.triple(
        [ipi + (2 * j - 1) * L, (4 * r - 2 * j) * L, ipi + K * L], ipi + K * L
    ) / E.triple([2 * L, 2 * L, 4 * L], 4 * L)
    return V + Vs


def _g(E: _Evaluator, r: int, j: int):
    L, ipi = E.lh, E.ipi
    K = 4 * r - 1
    m = L + ipi  # log(-q)
    U = E.triple([(2 * r - j) * L, (2 * r + j - 1) * L, K * L], K * L) / E.triple([L, 3 * L, 4 * L], 4 * L)
    Us = E.triple([(2 * r - j) * m, (2 * r + j - 1) * m, ipi + K * L], ipi + K * L) / E.triple(
        [ipi + L, ipi + 3 * L, 4 * L], 4 * L
    )
    sign = -1 if (j * (j - 1) // 2) % 2 else 1
    return E.power(Fraction(2 * j * j - 2 * j - 2 * r + 1, 16 * r - 4), L) * (U + sign * Us) / 2


def _hv(E: _Evaluator, r: int, j: int):
    L, ipi = E.lq, E.ipi
    e2 = Fraction((4 * j - 4 * r + 1) ** 2, 32 * r - 24)
    e1 = e2 + Fraction(4 * j - 2 * r - 1, 4)
    M, K = 16 * r - 12, 4 * r - 3
    V = E.power(e1, L) * E.triple(
        [4 * (2 * r - 1 - j) * L, (8 * r + 4 * j - 8) * L, M * L], M * L
    ) / E.triple([L, 3 * L, 4 * L], 4 * L)
    Vs = E.power(e2, L) * E.triple(
        [2 * (2 * r - j - 1) * L, ipi + (2 * j - 1) * L, ipi + K * L], ipi + K * L
    ) / E.triple([2 * L, 2 * L, 4 * L], 4 * L)
    return V + Vs


def _h(E: _Evaluator, r: int, j: int, signed: bool = True):
    L, ipi = E.lh, E.ipi
    K = 4 * r - 3
    m = L + ipi
    U = E.triple([(2 * r - j - 1) * L, (2 * r + j - 2) * L, K * L], K * L) / E.triple([L, 3 * L, 4 * L], 4 * L)
    Us = E.triple([(2 * r - j - 1) * m, (2 * r + j - 2) * m, ipi + K * L], ipi + K * L) / E.triple(
        [ipi + L, ipi + 3 * L, 4 * L], 4 * L
    )
    sign = -1 if signed and (j * (j - 1) // 2) % 2 else 1
    return E.power(Fraction(j * j - j - r + 1, 8 * r - 6), L) * (U + sign * Us) / 2


def _h_printed(E: _Evaluator, r: int, j: int):
    return _h(E, r, j, signed=False)


_COMPONENTS: dict[tuple[str, str], Callable] = {
    ("G", "vee"): _gv,
    ("G", "plain"): _g,
    ("H", "vee"): _hv,
    ("H", "plain"): _h,
    ("H", "printed"): _h_printed,
}


def _component_fn(family: str, which: str, r: int) -> Callable:
    _check(family, r)
    if which not in ("vee", "plain") and (family, which) != ("H", "printed"):
        raise DomainError(f"which must be 'vee' or 'plain', got {which!r}")
    return _COMPONENTS[family, which]


def eval_component(
    family: str, which: str, r: int, j: int, tau: complex, terms: int | None = None
) -> NumericValue:
    """One component ``g_j^vee``, ``g_j``, ``h_j^vee`` or ``h_j`` at ``tau``.

    ``h_j`` carries the sign ``(-1)^(j(j-1)/2)`` on its second product, as
    ``g_j`` does; ``which='printed'`` gives the unsigned variant, for which the
    dual transformation law fails.

    With ``terms`` unset each Pochhammer product runs until its factors are
    below working precision; otherwise it is cut after ``terms`` factors and
    the returned tail bounds the neglected part.
    """
    fn = _component_fn(family, which, r)
    if not 1 <= j <= dimension(family, r):
        raise DomainError(f"component index {j} out of range 1..{dimension(family, r)}")
    E = _Evaluator(tau, terms)
    return NumericValue(complex(fn(E, r, j)), E.tail)


def component_vector(family: str, which: str, r: int, tau: complex, terms: int | None = None) -> np.ndarray:
    fn = _component_fn(family, which, r)
    E = _Evaluator(tau, terms)
    return np.array([complex(fn(E, r, j)) for j in range(1, dimension(family, r) + 1)])


def _full_vector(family: str, r: int, tau: complex, terms: int | None) -> np.ndarray:
    """``G`` or ``H``: the vee components stacked over the plain ones."""
    fv, fp = _component_fn(family, "vee", r), _component_fn(family, "plain", r)
    E = _Evaluator(tau, terms)
    m = dimension(family, r)
    return np.array([complex(fv(E, r, j)) for j in range(1, m + 1)] + [complex(fp(E, r, j)) for j in range(1, m + 1)])


# -- matrices ---------------------------------------------------------------------------


def _cos_matrix(N: int, m: int) -> np.ndarray:
    idx = 2 * np.arange(1, m + 1) - 1
    return np.sqrt(2 / N) * np.cos(np.outer(idx, idx) * np.pi / (2 * N))


def build_S(r: int) -> np.ndarray:
    _check("G", r)
    return _cos_matrix(4 * r - 1, 2 * r - 1)


def build_S_tilde(r: int) -> np.ndarray:
    _check("H", r)
    return _cos_matrix(4 * r - 3, 2 * r - 2)


def _phase(x: Fraction) -> complex:
    """``exp(pi i x)`` with ``x`` reduced mod 2 first."""
    x = x - 2 * (x // 2)
    return complex(np.exp(1j * np.pi * float(x)))


def translation_matrices(family: str, r: int) -> dict[str, np.ndarray]:
    """Diagonal translation matrices: ``T``, ``T~`` and, for odd ``r`` in ``G``, ``T'``."""
    _check(family, r)
    m = dimension(family, r)
    js = range(1, m + 1)
    F = Fraction
    if family == "G":
        out = {
            "T": np.diag([_phase(F((4 * r - 4 * j + 1) ** 2, 8 * r - 2)) for j in js]),
            "T~": np.diag(
                [_phase(F(j * (j - 1) // 2) + F(2 * j * j - 2 * j - 2 * r + 1, 16 * r - 4)) for j in js]
            ),
        }
        if r % 2:
            out["T'"] = np.diag([_phase(F((4 * r - 4 * j + 1) ** 2, 16 * r - 4)) for j in js])
        return out
    return {
        "T": np.diag([_phase(F((4 * j - 4 * r + 1) ** 2, 4 * r - 3)) for j in js]),
        "T~": np.diag([_phase(F(j * (j - 1) // 2) + F(j * j - j - r + 1, 8 * r - 6)) for j in js]),
    }


def block_matrices(family: str, r: int) -> dict[str, np.ndarray]:
    """``P = [[0, 2S], [S, 0]]`` and the block translations ``Q`` (and ``Q'``)."""
    S = build_S(r) if family == "G" else build_S_tilde(r)
    m = S.shape[0]
    Z = np.zeros((m, m))
    T = translation_matrices(family, r)
    power = 2 if family == "G" else 4
    out = {
        "P": np.block([[Z, 2 * S], [S, Z]]),
        "Q": np.block([[T["T"], Z], [Z, np.linalg.matrix_power(T["T~"], power)]]),
    }
    if "T'" in T:
        out["Q'"] = np.block([[T["T'"], Z], [Z, T["T~"]]])
    return out



def phase_matrix_residual(family: str, r: int, signed: bool = True) -> float:
    """``max|P X L - S|`` for the permutation-phase, mixing and diagonal matrices of the dual law.

    ``G`` uses ``L = Lambda^-1``, ``H`` uses ``L = Lambda``. ``signed=False``
    drops the ``(-1)^(j(j-1)/2)`` factor from the ``H`` diagonal.
    """
    _check(family, r)
    m = dimension(family, r)
    P = np.zeros((m, m), complex)
    X = np.zeros((m, m), complex)
    lam = np.zeros(m, complex)
    F = Fraction
    for j in range(1, m + 1):
        sgn = -1 if (j * (j - 1) // 2) % 2 else 1
        if family == "G":
            ph, ks, den, c = _phase(F((4 * r - 4 * j + 1) ** 2, 32 * r - 8)), (2 * r - 2 * j + 1, 2 * j - 2 * r), 8 * r - 2, r
            lam[j - 1] = sgn * _phase(F(2 * j * j - 2 * j - 2 * r + 1, 16 * r - 4))  # Lambda^-1
            pre = _phase(F(3, 8)) / math.sqrt(8 * r - 2)
        else:
            ph, ks, den, c = _phase(F((4 * r - 4 * j - 1) ** 2, 32 * r - 24)), (2 * r - 2 * j, 2 * j - 2 * r + 1), 8 * r - 6, 3 * r - 2
            lam[j - 1] = (sgn if signed else 1) * _phase(F(j * j - j - r + 1, 8 * r - 6))
            pre = _phase(F(-1, 8)) / math.sqrt(8 * r - 6)
        for k in ks:
            if 1 <= k <= m:
                P[j - 1, k - 1] = ph
        for ell in range(1, m + 1):
            a = F(2 * j + 2 * ell - 3 + (2 * j + 2 * ell - 4) ** 2 * c, den)
            b = F(2 * j - 2 * ell - 1 + (2 * j - 2 * ell - 2) ** 2 * c, den)
            X[j - 1, ell - 1] = pre * (_phase(-a) + _phase(-b))
    S = build_S(r) if family == "G" else build_S_tilde(r)
    return float(np.max(np.abs(P @ X @ np.diag(lam) - S)))

# -- checks -----------------------------------------------------------------------------


def _residual(lhs, rhs) -> float:
    lhs, rhs = np.asarray(lhs), np.asarray(rhs)
    return float(np.max(np.abs(lhs - rhs)) / max(1.0, float(np.max(np.abs(rhs)))))


@dataclass
class TransformReport:
    family: str
    r: int
    tau: complex
    residuals: dict[str, float] = field(default_factory=dict)
    tol: float = 1e-8

    @property
    def passed(self) -> bool:
        return all(v < self.tol for v in self.residuals.values())

    def __bool__(self) -> bool:
        return self.passed

    def describe(self) -> str:
        parts = ", ".join(f"{k}={v:.2e}" for k, v in self.residuals.items())
        return f"{self.family} r={self.r} tau={self.tau}: {parts} -> {'pass' if self.passed else 'FAIL'}"

    def to_json(self) -> dict:
        return {
            "family": self.family,
            "r": self.r,
            "tau": [self.tau.real, self.tau.imag],
            "residuals": dict(self.residuals),
            "tol": self.tol,
            "pass": self.passed,
        }


def check_dual_transform(
    family: str, r: int, tau: complex, terms: int | None = None, tol: float = 1e-8
) -> TransformReport:
    """``x(-1/(2 tau)) = S x^vee(tau)`` and ``x^vee(-1/(2 tau)) = 2 S x(tau)``."""
    tau = complex(tau)
    S = build_S(r) if family == "G" else build_S_tilde(r)
    sigma = -1 / (2 * tau)
    vee, plain = component_vector(family, "vee", r, tau, terms), component_vector(family, "plain", r, tau, terms)
    vee_s, plain_s = (
        component_vector(family, "vee", r, sigma, terms),
        component_vector(family, "plain", r, sigma, terms),
    )
    return TransformReport(
        family, r, tau, {"plain": _residual(plain_s, S @ vee), "vee": _residual(vee_s, 2 * S @ plain)}, tol
    )


def check_translations(
    family: str, r: int, tau: complex, terms: int | None = None, tol: float = 1e-8
) -> TransformReport:
    """Diagonal translation laws; ``T'`` only for odd ``r`` in ``G``."""
    tau = complex(tau)
    T = translation_matrices(family, r)
    vee, plain = component_vector(family, "vee", r, tau, terms), component_vector(family, "plain", r, tau, terms)
    step = 2 if family == "G" else 4
    res = {
        "T": _residual(component_vector(family, "vee", r, tau + step, terms), T["T"] @ vee),
        "T~": _residual(component_vector(family, "plain", r, tau + 1, terms), T["T~"] @ plain),
    }
    if "T'" in T:
        res["T'"] = _residual(component_vector(family, "vee", r, tau + 1, terms), T["T'"] @ vee)
    return TransformReport(family, r, tau, res, tol)


def check_group_composites(
    family: str, r: int, tau: complex, terms: int | None = None, tol: float = 1e-8
) -> TransformReport:
    """The generators of the automorphy group acting on ``G`` or ``H``.

    ``G``: ``tau+2`` by ``Q`` and ``tau/(4 tau+1)`` by ``P Q^-1 P``; for odd
    ``r`` also ``tau+1`` by ``Q'`` and ``tau/(2 tau+1)`` by ``P Q'^-1 P``.
    ``H``: ``tau+4`` by ``Q`` and ``tau/(8 tau+1)`` by ``P Q^-1 P``.
    """
    tau = complex(tau)
    B = block_matrices(family, r)
    P = B["P"]
    X = _full_vector(family, r, tau, terms)
    step, c = (2, 4) if family == "G" else (4, 8)
    res = {
        "Q": _residual(_full_vector(family, r, tau + step, terms), B["Q"] @ X),
        "PQ^-1P": _residual(
            _full_vector(family, r, tau / (c * tau + 1), terms), P @ np.linalg.solve(B["Q"], P @ X)
        ),
    }
    if "Q'" in B:
        res["Q'"] = _residual(_full_vector(family, r, tau + 1, terms), B["Q'"] @ X)
        res["PQ'^-1P"] = _residual(
            _full_vector(family, r, tau / (2 * tau + 1), terms), P @ np.linalg.solve(B["Q'"], P @ X)
        )
    return TransformReport(family, r, tau, res, tol)


# -- eta, Weber and theta functions ----------------------------------------------------

_WEBER = ("eta", "f", "f1", "f2")


def eval_eta_weber(which: str, tau: complex, terms: int | None = None) -> complex:
    """``eta``, Weber's ``f``, ``f1`` and ``f2 = q^(1/24) (-q; q)_inf`` (no sqrt 2)."""
    if which not in _WEBER:
        raise DomainError(f"which must be one of {_WEBER}, got {which!r}")
    E = _Evaluator(tau, terms)
    L, ipi = E.lq, E.ipi
    if which == "eta":
        v = E.power(Fraction(1, 24), L) * E.poch(L, L)
    elif which == "f":
        v = E.power(Fraction(-1, 48), L) * E.poch(ipi + L / 2, L)
    elif which == "f1":
        v = E.power(Fraction(-1, 48), L) * E.poch(L / 2, L)
    else:
        v = E.power(Fraction(1, 24), L) * E.poch(ipi + L, L)
    return complex(v)


def eval_theta_numeric(kind: str, j, m, tau: complex, terms: int | None = None) -> complex:
    """Lattice sums ``h_{j,m}`` (``kind='h'``) and ``g_{j,m}`` (alternating, ``kind='g'``)."""
    if kind not in ("h", "g"):
        raise DomainError(f"kind must be 'h' or 'g', got {kind!r}")
    j, m = Fraction(j), Fraction(m)
    if m <= 0:
        raise DomainError(f"m must be positive, got {m}")
    E = _Evaluator(tau, terms)
    ctx = E.ctx
    shift = j / (2 * m)
    # |q^(m x^2)| < 10^-dps once x^2 > dps ln 10 / (2 pi m Im tau)
    K = math.ceil(math.sqrt(ctx.dps * math.log(10) / (2 * math.pi * float(m) * complex(tau).imag))) + 2
    K += math.ceil(abs(float(shift)))
    total = ctx.mpf(0)
    for k in range(-K, K + 1):
        term = E.power(m * (k + shift) ** 2, E.lq)
        total += -term if kind == "g" and k % 2 else term
    return complex(total)


def check_eta_weber_laws(tau: complex) -> dict[str, float]:
    """Residuals of the S and T laws of ``eta``, ``f``, ``f1``, ``f2``."""
    tau = complex(tau)
    s = -1 / tau
    ev = eval_eta_weber
    root = complex(np.sqrt(-1j * tau))
    e24, e48 = np.exp(1j * np.pi / 12), np.exp(-1j * np.pi / 24)
    pairs = {
        "eta(-1/tau)": (ev("eta", s), root * ev("eta", tau)),
        "eta(tau+1)": (ev("eta", tau + 1), e24 * ev("eta", tau)),
        "f(-1/tau)": (ev("f", s), ev("f", tau)),
        "f2(-1/tau)": (ev("f2", s), ev("f1", tau) / np.sqrt(2)),
        "f1(-1/tau)": (ev("f1", s), np.sqrt(2) * ev("f2", tau)),
        "f(tau+1)": (ev("f", tau + 1), e48 * ev("f1", tau)),
        "f1(tau+1)": (ev("f1", tau + 1), e48 * ev("f", tau)),
        "f2(tau+1)": (ev("f2", tau + 1), e24 * ev("f2", tau)),
    }
    return {k: _residual(a, b) for k, (a, b) in pairs.items()}


def check_wakimoto(j: int, m, tau: complex) -> float:
    """Residual of the S-transformation of ``g_{j,m}`` into half-index ``h`` sums."""
    tau = complex(tau)
    m = Fraction(m)
    if (2 * m).denominator != 1 or m <= 0:
        raise DomainError(f"m must lie in (1/2) N, got {m}")
    lhs = eval_theta_numeric("g", j, m, -1 / tau)
    acc = 0j
    for k in range(1, int(4 * m), 2):
        acc += np.exp(1j * np.pi * j * k / float(2 * m)) * eval_theta_numeric("h", Fraction(k, 2), m, tau)
    rhs = complex(np.sqrt(-1j * tau)) / math.sqrt(float(2 * m)) * acc
    return _residual(lhs, rhs)


def ww_epsilon(m: int) -> complex:
    if m % 4 == 1:
        return 1 + 0j
    if m % 4 == 3:
        return 1j
    raise DomainError(f"m must be odd, got {m}")


def ww_delta(m: int) -> int:
    """``delta_m`` with ``4 delta_m = 1 mod m``: ``r`` for ``m = 4r-1``, ``3r-2`` for ``m = 4r-3``."""
    if m % 4 == 3:
        return (m + 1) // 4
    if m % 4 == 1:
        return 3 * (m + 3) // 4 - 2
    raise DomainError(f"m must be odd, got {m}")


def check_lemma_ww(
    j: int, m: int, tau: complex, delta: int | None = None, epsilon: complex | None = None
) -> float:
    """Residual of the expansion of ``g_{j,m}(-(tau+1)/(4 tau))`` in ``g_{l,m}((tau+1)/4)``."""
    tau = complex(tau)
    if j % 2 == 0 or not 1 <= j <= m:
        raise DomainError(f"need odd 1 <= j <= m, got j={j}, m={m}")
    delta = ww_delta(m) if delta is None else delta
    if (4 * delta - 1) % m:
        raise DomainError(f"4*{delta} is not 1 mod {m}")
    epsilon = ww_epsilon(m) if epsilon is None else epsilon
    lhs = eval_theta_numeric("g", j, m, -(tau + 1) / (4 * tau))
    acc = 0j
    for ell in range(1, m, 2):
        a = (1 - (j + ell) - (j + ell - 2) ** 2 * delta) / (2 * m)
        b = (1 - (j - ell) - (j - ell - 2) ** 2 * delta) / (2 * m)
        acc += (np.exp(1j * np.pi * a) + np.exp(1j * np.pi * b)) * eval_theta_numeric("g", ell, m, (tau + 1) / 4)
    rhs = complex(np.sqrt(-tau / m)) * epsilon * acc
    return _residual(lhs, rhs)


# -- ties back to the Nahm sums ---------------------------------------------------------


def _nahm(family: str, r: int, j: int, tau: complex) -> complex:
    return eval_nahm_numeric(build_family(family, r, j), tau=tau).value


def _half_period(family: str, r: int, j: int, tau: complex, sign: int) -> complex:
    """``(q^c/2)(f(q) + sign f(-q))`` at ``q = e^(2 pi i tau)``; the shift moves the sum, not ``q^c``."""
    spec = build_family(family, r, j)
    a = eval_nahm_numeric(spec, tau=tau, include_c=False).value
    b = eval_nahm_numeric(spec, tau=tau + 1, include_c=False).value
    return complex(np.exp(2j * np.pi * float(spec.c) * tau)) * (a + sign * b) / 2


def check_remark_identities(family: str, r: int, tau: complex, tol: float = 1e-8) -> TransformReport:
    """Components that coincide with single Nahm sums or half-period combinations.

    ``G``: ``g_1^vee`` and ``g_j^vee`` (``r <= j <= 2r-1``) against ``T1.1-1``;
    ``g_j(2 tau)`` for ``j = 2r-1`` and even ``j`` against the half-period
    combination of ``T1.2``.  ``H``: the same with ``T1.1-2`` and the signed ``T1.3``.
    """
    tau = complex(tau)
    _check(family, r)
    res: dict[str, float] = {}
    vee = component_vector(family, "vee", r, tau)
    plain2 = component_vector(family, "plain", r, 2 * tau)
    if family == "G":
        dual, single = "T1.1-1", "T1.2"
        vee_pairs = [(1, 0)] + [(j, 2 * r - j) for j in range(r, 2 * r)]
        plain_pairs = [(2 * r - 1, 0, (-1) ** (r - 1))] + [
            (j, r - j // 2, (-1) ** (j * (j - 1) // 2)) for j in range(2, 2 * r - 1, 2)
        ]
    else:
        dual, single = "T1.1-2", "T1.3"
        vee_pairs = [(1, 0)] + [(j, 2 * r - j - 1) for j in range(r - 1, 2 * r - 1)]
        plain_pairs = [(2 * r - 2, 0, (-1) ** (r - 1))] + [
            (j, r - (j + 1) // 2, (-1) ** (j * (j - 1) // 2)) for j in range(1, 2 * r - 2, 2)
        ]
    for j, k in vee_pairs:
        res[f"vee_{j}=f[{k}]"] = _residual(vee[j - 1], _nahm(dual, r, k, tau))
    for j, k, sign in plain_pairs:
        res[f"plain_{j}(2tau)=f[{k}]"] = _residual(plain2[j - 1], _half_period(single, r, k, 2 * tau, sign))
    return TransformReport(family, r, tau, res, tol)
