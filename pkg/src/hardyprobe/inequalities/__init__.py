# src/hardyprobe/inequalities/__init__.py
"""Admissibility, reductions and grid checks of the Sobolev-type inequalities."""

from .checks import (
    CheckMode,
    RatioReport,
    RatioVerdict,
    RegionShares,
    UncertaintyResult,
    check_ckn,
    check_critical_hardy,
    check_hardy_sobolev,
    check_hls,
    check_uncertainty,
    classify_trend,
    critical_b2_analog,
    region_decomposition,
)
from .conditions import AdmissibilityReport, ConditionRegistry, reduce, validate
from .grid import Bump, BumpSum, UniformGrid, concentrating_bumps, random_bumps, unit_bump, zero_input
from .specs import KIND_PARAMS, InequalityKind, InequalitySpec

__all__ = [
    "AdmissibilityReport",
    "Bump",
    "BumpSum",
    "CheckMode",
    "ConditionRegistry",
    "InequalityKind",
    "InequalitySpec",
    "KIND_PARAMS",
    "RatioReport",
    "RatioVerdict",
    "RegionShares",
    "UncertaintyResult",
    "UniformGrid",
    "check_ckn",
    "check_critical_hardy",
    "check_hardy_sobolev",
    "check_hls",
    "check_uncertainty",
    "classify_trend",
    "concentrating_bumps",
    "critical_b2_analog",
    "random_bumps",
    "reduce",
    "region_decomposition",
    "unit_bump",
    "validate",
    "zero_input",
]
