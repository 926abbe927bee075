"""Exact q-series engine for generalized Nahm sums and their modular companions."""

from .series import (
    Comparison,
    PuiseuxSeries,
    SeriesError,
    alt_pochhammer_infinite,
    invert,
    monomial,
    pochhammer_finite,
    pochhammer_infinite,
    q_product,
    series_equal,
)
from .nahm import DomainError, NahmSpec, build_family, eval_nahm, eval_nahm_numeric
from .products import EtaQuotientSpec, GenEtaSpec, eta_quotient, rhs_builder
from .bailey import BaileyPair, catalogue, verify_pair
from .modularity import level_checks, robins_analyze
from .suites import SUITES, run_suite, suite_tasks

__all__ = [
    "Comparison",
    "PuiseuxSeries",
    "SeriesError",
    "alt_pochhammer_infinite",
    "invert",
    "monomial",
    "pochhammer_finite",
    "pochhammer_infinite",
    "q_product",
    "series_equal",
    "DomainError",
    "NahmSpec",
    "build_family",
    "eval_nahm",
    "eval_nahm_numeric",
    "EtaQuotientSpec",
    "GenEtaSpec",
    "eta_quotient",
    "rhs_builder",
    "BaileyPair",
    "catalogue",
    "verify_pair",
    "level_checks",
    "robins_analyze",
    "SUITES",
    "run_suite",
    "suite_tasks",
]
