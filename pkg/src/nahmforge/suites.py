"""Enumerated verification suites shared by the command line and the test-suite.

Each suite expands to independent tasks ``(suite, name, params)``; ``run_task``
executes one and returns a :class:`CheckResult`.  Tasks are plain tuples so a
process pool can ship them.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

from . import bailey, modularity, transforms
from .nahm import (
    DESCENDING_TAGS,
    DescendingSumSpec,
    build_capparelli,
    build_family,
    build_sumC,
    build_wang,
    eval_descending,
    eval_nahm,
)
from .products import rhs_builder
from .series import series_equal

__all__ = ["SUITES", "CheckResult", "run_suite", "run_task", "suite_tasks", "thread_cap"]

SUITES = ("identities", "bailey", "modularity", "transforms")

Task = tuple  # (suite, name, params-dict)

_FAMILY_TAGS = {"T1.1-1": ("1.7", "1.8"), "T1.1-2": ("1.9", "1.10"), "T1.2": ("1.11", "1.12"), "T1.3": ("1.13", "1.14")}
_J_TAGS = {"2.1b", "2.1d", "2.2b", "2.4b"}
DUAL_SAMPLES = (0.7071067811865476j, 0.2 + 0.9j, 1j, -0.3 + 0.8j, 0.45 + 0.6j)
# points where both tau and its image under the non-translation generator stay well inside H
COMPOSITE_SAMPLES = {"G": (2j, -0.25 + 0.25j), "H": (2j, -0.125 + 0.125j)}
REMARK_SAMPLES = (1j, 0.3 + 0.9j)


@dataclass
class CheckResult:
    suite: str
    name: str
    params: dict
    ok: bool
    detail: str
    data: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        out = {"suite": self.suite, "name": self.name, "params": self.params, "ok": self.ok, "detail": self.detail}
        return {**out, **self.data}


def thread_cap() -> int:
    """Worker count from ``NAHMFORGE_THREADS`` (default 1)."""
    raw = os.environ.get("NAHMFORGE_THREADS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def identity_order(r: int, order: int | None) -> int:
    return order if order is not None else (60 if r <= 3 else 40)


def suite_tasks(
    suite: str, r_min: int = 2, r_max: int = 5, order: int | None = None, tol: float = 1e-8, terms: int | None = None
) -> list[Task]:
    """Tasks of one suite over ranks ``r_min..r_max``; ``order=None`` picks each check's default."""
    if suite not in SUITES:
        raise ValueError(f"unknown suite {suite!r}; expected one of {SUITES}")
    rs = range(r_min, r_max + 1)
    out: list[Task] = []
    if suite == "identities":
        for r in rs:
            o = identity_order(r, order)
            for fam in _FAMILY_TAGS:
                out += [("identities", fam, {"r": r, "j": j, "order": o}) for j in range(r + 1)]
            out.append(("identities", "W1.1", {"r": r, "j": None, "order": o}))
            out += [("identities", "W1.2", {"r": r, "j": j, "order": o}) for j in range(1, r + 1)]
            if r >= 3:
                out.append(("identities", "SumC", {"r": r, "j": None, "order": o}))
            for tag in DESCENDING_TAGS:
                if tag.startswith("2.3") and r < 3:
                    continue
                js = range(1, r + 1) if tag in _J_TAGS else [None]
                out += [("identities", tag, {"r": r, "j": j, "order": o}) for j in js]
        out.append(("identities", "Capparelli", {"r": None, "j": None, "order": order or 60}))
    elif suite == "bailey":
        o = order or 30
        out += [("bailey", f"pair:{t}", {"n_max": 6, "order": o}) for t in bailey.CATALOGUE_TAGS]
        out += [("bailey", f"S1:{t}", {"n_max": 5, "order": o}) for t in bailey.CATALOGUE_TAGS]
        out += [
            ("bailey", f"shift:{t}", {"n_max": 5, "order": o})
            for t in bailey.CATALOGUE_TAGS
            if bailey.catalogue(t).a_exp >= 1
        ]
        for tag in bailey.REPLAY_TAGS:
            for r in range(max(r_min, 3 if tag.startswith("2.3") else 2), min(r_max, 3) + 1):
                js = range(1, r + 1) if tag in _J_TAGS else [None]
                out += [("bailey", f"replay:{tag}", {"r": r, "j": j, "order": 40}) for j in js]
    elif suite == "modularity":
        for th in modularity.THEOREMS:
            out += [("modularity", f"levels:{th}", {"r": r}) for r in rs]
            for r in rs:
                out += [("modularity", f"crosscheck:{th}", {"r": r, "j": j, "order": order or 20}) for j in range(r + 1)]
    else:
        extra = {} if terms is None else {"terms": terms}
        out.append(("transforms", "S-involution", {"r_max": 12, "tol": 1e-12}))
        out.append(("transforms", "phase-matrix", {"r_max": 12, "tol": 1e-12}))
        out.append(("transforms", "eta-weber", {"tau": [0.3, 1.1], "tol": 1e-10}))
        out.append(("transforms", "lemma-theta-S", {"tol": tol}))
        out.append(("transforms", "lemma-theta-mixed", {"tol": tol}))
        for fam in ("G", "H"):
            for r in rs:
                for tau in DUAL_SAMPLES:
                    out.append(("transforms", f"dual:{fam}", {"r": r, "tau": [tau.real, tau.imag], "tol": tol, **extra}))
                out.append(("transforms", f"translations:{fam}", {"r": r, "tau": [0.0, 1.0], "tol": tol, **extra}))
                for tau in COMPOSITE_SAMPLES[fam]:
                    params = {"r": r, "tau": [tau.real, tau.imag], "tol": tol, **extra}
                    out.append(("transforms", f"composites:{fam}", params))
            for r in range(r_min, min(r_max, 3) + 1):
                for tau in REMARK_SAMPLES:
                    out.append(("transforms", f"remark:{fam}", {"r": r, "tau": [tau.real, tau.imag], "tol": tol}))
    return out


def _identity(name: str, r: int | None, j: int | None, order: int) -> CheckResult:
    params = {"r": r, "j": j, "order": order}
    if name in _FAMILY_TAGS:
        lhs = eval_nahm(build_family(name, r, j), order)
        tag = _FAMILY_TAGS[name][0 if j == 0 else 1]
        rhs = rhs_builder(tag, r, j or None, order)
    elif name in ("W1.1", "W1.2"):
        lhs = eval_nahm(build_wang(r, j), order)
        rhs = rhs_builder(name, r, j, order)
    elif name == "SumC":
        s1, s2, shift = build_sumC(r)
        lhs = eval_nahm(s1, order) + eval_nahm(s2, order).shift(shift)
        rhs = rhs_builder("SumC", r, order=order)
    elif name == "Capparelli":
        lhs = eval_nahm(build_capparelli(), order)
        rhs = rhs_builder("Capparelli", order=order)
    else:
        lhs = eval_descending(DescendingSumSpec(name, r, j), order)
        rhs = rhs_builder(name, r, j, order)
    cmp = series_equal(lhs, rhs)
    data = {"checked_order": str(cmp.order)}
    if not cmp.equal:
        data["first_mismatch"] = {"exponent": str(cmp.exponent), "lhs": str(cmp.left), "rhs": str(cmp.right)}
    return CheckResult("identities", name, params, cmp.equal, cmp.describe(), data)


def _bailey(name: str, params: dict) -> CheckResult:
    kind, tag = name.split(":")
    if kind == "replay":
        rep = bailey.replay_derivation(tag, params["r"], params["j"], params["order"])
        return CheckResult("bailey", name, params, rep.ok, rep.describe())
    pair = bailey.catalogue(tag)
    if kind == "S1":
        pair = bailey.transform_S1(pair)
    elif kind == "shift":
        pair = bailey.transform_shift(pair)
    rep = bailey.verify_pair(pair, params["n_max"], params["order"])
    return CheckResult("bailey", name, params, bool(rep), rep.describe())


def _modularity(name: str, params: dict) -> CheckResult:
    kind, th = name.split(":")
    r = params["r"]
    if kind == "levels":
        checks = modularity.level_checks(th, r)
        ok = all(c.ok for c in checks)
        levels = sorted({c.level for c in checks})
        detail = f"level(s) {levels}, closed form {modularity.theorem_data(th).level(r)}"
        return CheckResult("modularity", name, params, ok, detail, {"quotients": [c.to_json() for c in checks]})
    cmp = modularity.crosscheck_quotient_vs_nahm(th, r, params["j"], params["order"])
    return CheckResult("modularity", name, params, cmp.equal, cmp.describe())


def _transforms(name: str, params: dict) -> CheckResult:
    import numpy as np

    tol = params.get("tol", 1e-8)
    if name == "S-involution":
        worst = 0.0
        for r in range(2, params["r_max"] + 1):
            for S in (transforms.build_S(r), transforms.build_S_tilde(r)):
                worst = max(worst, float(np.max(np.abs(2 * S @ S - np.eye(len(S))))))
        return CheckResult("transforms", name, params, worst < tol, f"max |2S^2 - I| = {worst:.2e}")
    if name == "phase-matrix":
        worst = max(
            transforms.phase_matrix_residual(f, r) for f in ("G", "H") for r in range(2, params["r_max"] + 1)
        )
        return CheckResult("transforms", name, params, worst < tol, f"max |PXL - S| = {worst:.2e}")
    if name == "eta-weber":
        res = transforms.check_eta_weber_laws(complex(*params["tau"]))
        worst = max(res.values())
        return CheckResult("transforms", name, params, worst < tol, f"max residual {worst:.2e}", {"residuals": res})
    if name == "lemma-theta-S":
        res = {
            f"j={j},m={m}": transforms.check_wakimoto(j, m, 0.3 + 1.1j)
            for m in (Fraction(7, 2), Fraction(3), Fraction(5, 2))
            for j in (0, 1, 2, 3)
        }
        worst = max(res.values())
        return CheckResult("transforms", name, params, worst < tol, f"max residual {worst:.2e}", {"residuals": res})
    if name == "lemma-theta-mixed":
        res = {
            f"j={j},m={m}": transforms.check_lemma_ww(j, m, tau)
            for m in (7, 5, 11, 9)
            for j in range(1, m + 1, 2)
            for tau in (0.2 + 1.1j,)
        }
        worst = max(res.values())
        return CheckResult("transforms", name, params, worst < tol, f"max residual {worst:.2e}", {"residuals": res})
    kind, fam = name.split(":")
    tau = complex(*params["tau"])
    fn = {
        "dual": transforms.check_dual_transform,
        "translations": transforms.check_translations,
        "composites": transforms.check_group_composites,
    }.get(kind)
    if fn is not None:
        rep = fn(fam, params["r"], tau, terms=params.get("terms"), tol=tol)
    else:
        rep = transforms.check_remark_identities(fam, params["r"], tau, tol=tol)
    return CheckResult("transforms", name, params, rep.passed, rep.describe(), {"residuals": rep.residuals})


def run_task(task: Task) -> CheckResult:
    suite, name, params = task
    try:
        if suite == "identities":
            return _identity(name, params["r"], params["j"], params["order"])
        if suite == "bailey":
            return _bailey(name, params)
        if suite == "modularity":
            return _modularity(name, params)
        return _transforms(name, params)
    except Exception as exc:  # a crash in one task is a failed check, not a dead run
        return CheckResult(suite, name, params, False, f"error: {type(exc).__name__}: {exc}")


def run_suite(tasks: Iterable[Task], workers: int | None = None) -> list[CheckResult]:
    """Run tasks, in parallel processes when ``workers > 1``; results keep task order."""
    tasks = list(tasks)
    workers = thread_cap() if workers is None else workers
    if workers <= 1 or len(tasks) < 2:
        return [run_task(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(run_task, tasks))
