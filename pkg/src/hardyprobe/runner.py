# src/hardyprobe/runner.py
"""Batch execution behind the validate, bconst, check and sweep commands.

Everything configurable is resolved up front, so a bad config fails with a ConfigError
before any numerics run.  Problems then run in a ProblemPool; a failing problem becomes an
item with ``ok=False`` and an error instead of aborting the batch.
"""

import logging
import math
import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .config import ExperimentConfig, FamilyConfig, HardyProblemConfig, InequalityConfig
from .errors import ConfigError, HardyProbeError, ParameterError
from .execution import ProblemPool
from .hardy_core import (
    BReport,
    HardyProblem,
    Verdict,
    Which,
    b_curve,
    compute_B1,
    compute_B2,
    compute_B3,
    compute_B4,
    infer_which,
    sandwich_check,
)
from .inequalities import (
    CheckMode,
    InequalityKind,
    InequalitySpec,
    RatioReport,
    RatioVerdict,
    check_ckn,
    check_critical_hardy,
    check_hardy_sobolev,
    check_hls,
    check_uncertainty,
    classify_trend,
    critical_b2_analog,
    reduce,
    region_decomposition,
    validate,
)
from .inequalities.checks import STABILITY_BAND, grid_dim
from .inequalities.grid import (
    RESOLUTION_SHARE,
    UniformGrid,
    concentrate_width,
    concentrating_bumps,
    random_bumps,
    unit_bump,
    zero_input,
)
from .kernels import KernelBound
from .test_functions import fk_family, seeded_problems, standard_family

logger = logging.getLogger(__name__)

COMPUTE = {Which.B1: compute_B1, Which.B2: compute_B2, Which.B3: compute_B3, Which.B4: compute_B4}
CURVE_POINTS = 41
REGION_KINDS = (InequalityKind.HARDY_SOBOLEV, InequalityKind.HARDY, InequalityKind.CRITICAL_HARDY)
CRITICAL_KINDS = (InequalityKind.CRITICAL_HARDY, InequalityKind.UNCERTAINTY_CRITICAL)
VERDICT_LEVEL = {"bounded": 1.0, "finite": 1.0, "admissible": 1.0, "inconclusive": 0.5,
                 "unbounded": 0.0, "divergent": 0.0, "inadmissible": 0.0, "error": math.nan}


@dataclass
class RunOptions:
    seed: int = 0
    tol: float = 1e-9
    jobs: int = 1
    expect_unbounded: bool = False
    allow_inadmissible: bool = False


@dataclass
class ItemResult:
    """Outcome of one problem: the report record, optional CSV rows and plot data."""
    name: str
    record: Dict[str, Any]
    verdict: str = ""
    ok: bool = True
    rows: Optional[List[Dict[str, Any]]] = None
    plots: Dict[str, List[Tuple[float, float]]] = field(default_factory=dict)
    error: Optional[Exception] = None
    elapsed: float = 0.0


@dataclass
class ProblemItem:
    name: str
    problem: HardyProblem
    which: Which
    family: FamilyConfig
    expect_divergent: bool = False


@dataclass
class InequalityItem:
    name: str
    spec: InequalitySpec
    cfg: InequalityConfig
    kernel: Optional[KernelBound] = None


WorkItem = Union[ProblemItem, InequalityItem]


def item_seed(seed: int, index: int) -> int:
    """Per-item seed; depends only on (seed, index), never on scheduling."""
    return int(np.random.SeedSequence([seed, index]).generate_state(1)[0])


# --- planning -----------------------------------------------------------------------------


def _problem_item(config: ExperimentConfig, cfg: HardyProblemConfig) -> ProblemItem:
    problem = config.build_problem(cfg)
    which = cfg.which or infer_which(problem)
    return ProblemItem(cfg.name, problem, which, cfg.family, cfg.expect_divergent)


def _inequality_item(config: ExperimentConfig, cfg: InequalityConfig) -> InequalityItem:
    return InequalityItem(cfg.name, config.build_spec(cfg), cfg, config.build_kernel(cfg))


def plan_problems(config: ExperimentConfig, seed: int) -> List[ProblemItem]:
    """Configured problems followed by the seeded suite, if any."""
    items = [_problem_item(config, cfg) for cfg in config.problems]
    if config.suite is not None:
        suite_seed = config.suite.seed if config.suite.seed is not None else seed
        for problem in seeded_problems(suite_seed, config.suite.count):
            items.append(ProblemItem(problem.name, problem, infer_which(problem), FamilyConfig()))
    return items


def plan_inequalities(config: ExperimentConfig) -> List[InequalityItem]:
    return [_inequality_item(config, cfg) for cfg in config.inequalities]


def _failed(name: str, error: Exception) -> ItemResult:
    logger.debug(f"{name} failed", exc_info=True)
    return ItemResult(name, {"name": name, "error_type": type(error).__name__, "error": str(error)},
                      verdict="error", ok=False, error=error)


def run_items(items: Sequence[WorkItem], fn: Callable[[int, Any], ItemResult], jobs: int) -> List[ItemResult]:
    def guarded(index: int, item: WorkItem) -> ItemResult:
        started = time.perf_counter()
        try:
            result = fn(index, item)
        except (HardyProbeError, ArithmeticError, ValueError) as e:
            result = _failed(item.name, e)
        result.elapsed = time.perf_counter() - started
        return result

    return ProblemPool(jobs).map(guarded, items)


# --- validate -----------------------------------------------------------------------------


def validate_problem(item: ProblemItem) -> ItemResult:
    expected = infer_which(item.problem)
    admissible = item.which == expected
    record = {
        "name": item.name,
        "type": "hardy_problem",
        "which": item.which.value,
        "admissible": admissible,
        "violations": [] if admissible else [f"which: {item.which.value} given, {expected.value} applies"],
        "problem": item.problem.describe(),
    }
    return ItemResult(item.name, record, "admissible" if admissible else "inadmissible", admissible)


def validate_inequality(item: InequalityItem) -> ItemResult:
    report = validate(item.spec)
    record = report.to_record()
    record["type"] = "inequality"
    reduced = reduce(item.spec)
    record["reduces_to"] = reduced.describe() if reduced is not None else None
    verdict = "admissible" if report.admissible else "inadmissible"
    return ItemResult(item.name, record, verdict, report.admissible)


def run_validate(config: ExperimentConfig, options: RunOptions) -> List[ItemResult]:
    results = [validate_problem(item) for item in plan_problems(config, options.seed)]
    results += [validate_inequality(item) for item in plan_inequalities(config)]
    if options.allow_inadmissible:
        for result in results:
            result.ok = True
    return results


# --- bconst -------------------------------------------------------------------------------


def _curve_radii(pb: HardyProblem, center: Optional[float]) -> List[float]:
    lo, hi = pb.radial_range()
    center = center or 1.0
    radii = center * np.geomspace(1e-2, 1e2, CURVE_POINTS)
    return [float(r) for r in radii if lo < r < hi]


def _b_report(item: ProblemItem, tol: float) -> BReport:
    return COMPUTE[item.which](item.problem, tol)


def _curve_plot(item: ProblemItem, report: BReport, tol: float) -> Dict[str, List[Tuple[float, float]]]:
    if item.which not in (Which.B1, Which.B2) or not report.is_finite:
        return {}
    return {f"{item.name}_b_curve": b_curve(item.problem, _curve_radii(item.problem, report.argmax_R), tol)}


def bconst_problem(item: ProblemItem, options: RunOptions) -> ItemResult:
    report = _b_report(item, options.tol)
    verdict = "finite" if report.is_finite else "divergent"
    ok = not report.is_finite if item.expect_divergent else True
    return ItemResult(item.name, report.to_record(), verdict, ok, plots=_curve_plot(item, report, options.tol))


def run_bconst(config: ExperimentConfig, options: RunOptions) -> List[ItemResult]:
    items = plan_problems(config, options.seed)
    return run_items(items, lambda i, item: bconst_problem(item, options), options.jobs)


# --- check --------------------------------------------------------------------------------


def build_family(item: ProblemItem, report: BReport, seed: int) -> list:
    family_cfg = item.family
    family_seed = family_cfg.seed if family_cfg.seed is not None else seed
    family = []
    for kind in family_cfg.kinds:
        if kind == "standard":
            family += standard_family(item.problem, report, seed=family_seed,
                                      random_count=family_cfg.random_count, epsilon=family_cfg.epsilon)
        else:
            family += fk_family(family_cfg.k_max, family_cfg.k_min)
    return family


def check_problem(index: int, item: ProblemItem, config: ExperimentConfig, options: RunOptions) -> ItemResult:
    tolerances = config.tolerances
    report = _b_report(item, options.tol)
    family = build_family(item, report, item_seed(options.seed, index))
    result = sandwich_check(item.problem, family, report, upper_slack=tolerances.ratio_slack,
                            lower_slack=tolerances.lower_slack, tol=options.tol)
    if item.expect_divergent:
        ok = result.verdict == Verdict.DIVERGENCE_CONFIRMED
    else:
        ok = result.verdict == Verdict.PASS or (
            options.expect_unbounded and result.verdict == Verdict.DIVERGENCE_CONFIRMED)
    record = result.to_record()
    record["name"] = item.name
    return ItemResult(item.name, record, result.verdict.value, ok, plots=_curve_plot(item, report, options.tol))


def build_inputs(cfg: InequalityConfig, grid: UniformGrid, seed: int) -> list:
    """The configured input family on ``grid``."""
    dim = grid.dim
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim]))
    concentrate = cfg.mode == CheckMode.CONCENTRATE
    inputs = []
    for kind in cfg.inputs:
        if kind == "unit_bump":
            inputs.append(unit_bump(dim, width=concentrate_width(grid) if concentrate else 1.0))
        elif kind == "random_bumps":
            inputs.append(random_bumps(rng, dim, 3, grid.half_width))
        elif kind == "zero":
            inputs.append(zero_input())
        else:
            # two halvings below the narrowest resolvable start
            start = max(0.5, 2.5 * grid.h / RESOLUTION_SHARE)
            inputs += concentrating_bumps(dim, levels=2, zoom=2.0, width=start)
    return inputs


def _check_grid(item: InequalityItem) -> UniformGrid:
    dim = grid_dim(item.spec)
    if item.cfg.grid is not None:
        return item.cfg.grid.to_grid(dim)
    return UniformGrid(dim)


def run_check_spec(item: InequalityItem, seed: int, tol: float) -> Union[RatioReport, Dict[str, Any]]:
    """Dispatches to the checker of the spec's kind."""
    spec, cfg = item.spec, item.cfg
    kind = spec.kind
    if kind in (InequalityKind.UNCERTAINTY, InequalityKind.UNCERTAINTY_CRITICAL):
        result = check_uncertainty(spec, kernel=item.kernel, grid=_check_grid(item))
        return result.to_record()
    if kind == InequalityKind.HLS and spec.char_rate > 0.0:
        return {"validation_only": True}

    grid = _check_grid(item)
    inputs = build_inputs(cfg, grid, seed)
    if kind == InequalityKind.HLS:
        return check_hls(spec, kernel=item.kernel, grid=grid, levels=cfg.levels, seed=seed)
    common = dict(inputs=inputs, kernel=item.kernel, grid=grid, mode=cfg.mode, levels=cfg.levels,
                  zoom=cfg.zoom, seed=seed)
    if kind in (InequalityKind.HARDY_SOBOLEV, InequalityKind.HARDY):
        return check_hardy_sobolev(spec, **common)
    if kind == InequalityKind.CRITICAL_HARDY:
        return check_critical_hardy(spec, tol=tol, **common)
    if kind in (InequalityKind.CKN, InequalityKind.GN):
        return check_ckn(spec, **common)
    # critical CKN has no convolution form of its own; its first factor is a critical Hardy bound
    return critical_b2_analog(_critical_part(spec), tol).to_record()


def _critical_part(spec: InequalitySpec) -> InequalitySpec:
    if not math.isfinite(spec.q_tilde):
        raise ParameterError(f"{spec.label}: the interpolated exponent is infinite")
    return InequalitySpec(InequalityKind.CRITICAL_HARDY,
                          {"p": spec.p1, "q": spec.q_tilde, "r": spec.r},
                          spec.space, spec.char_rate, f"{spec.label}:critical")


def _expected_verdict(admissible: bool, options: RunOptions) -> RatioVerdict:
    if options.expect_unbounded and not admissible:
        return RatioVerdict.UNBOUNDED
    return RatioVerdict.BOUNDED


def check_inequality(index: int, item: InequalityItem, config: ExperimentConfig, options: RunOptions) -> ItemResult:
    seed = item_seed(options.seed, index)
    admissibility = validate(item.spec)
    outcome = run_check_spec(item, seed, options.tol)
    expected = _expected_verdict(admissibility.admissible, options)

    if isinstance(outcome, RatioReport):
        band = config.tolerances.stability_band
        if band != STABILITY_BAND and item.spec.kind != InequalityKind.CRITICAL_HARDY:
            outcome.verdict = classify_trend(outcome.refinement_trend, band)
        record = outcome.to_record()
        rows = outcome.to_rows()
        verdict = outcome.verdict.value
        ok = outcome.verdict == expected
        holder = outcome.notes.get("holder_holds")
        if holder is not None and holder < 1.0:
            ok = False
        plots = {f"{item.name}_levels": list(zip(outcome.levels, outcome.refinement_trend))}
    elif "pass" in outcome:
        record, rows, plots = dict(outcome), None, {}
        verdict = "bounded" if outcome["pass"] and outcome["holder_holds"] else "unbounded"
        ok = RatioVerdict(verdict) == expected
    elif "validation_only" in outcome:
        record, rows, plots = dict(outcome), None, {}
        verdict = "admissible" if admissibility.admissible else "inadmissible"
        ok = admissibility.admissible or options.allow_inadmissible
    else:
        record, rows, plots = {"b2_analog": outcome}, None, {}
        verdict = "bounded" if outcome["value"] != "divergent" else "unbounded"
        ok = RatioVerdict(verdict) == expected

    record["name"] = item.name
    record["kind"] = item.spec.kind.value
    record["admissible"] = admissibility.admissible
    record["violations"] = admissibility.violations
    if item.cfg.region and item.spec.kind in REGION_KINDS:
        shares = region_decomposition(item.spec, kernel=item.kernel)
        record["region"] = shares.to_record()
        ok = ok and shares.holds
    if rows is not None:
        rows = [dict(row, admissible=admissibility.admissible) for row in rows]
    return ItemResult(item.name, record, verdict, ok, rows=rows, plots=plots)


def run_check(config: ExperimentConfig, options: RunOptions) -> List[ItemResult]:
    problems = plan_problems(config, options.seed)
    inequalities = plan_inequalities(config)
    results = run_items(problems, lambda i, item: check_problem(i, item, config, options), options.jobs)
    offset = len(problems)
    results += run_items(inequalities,
                         lambda i, item: check_inequality(offset + i, item, config, options), options.jobs)
    return results


# --- sweep --------------------------------------------------------------------------------


def parse_axis(axis: str) -> Tuple[str, str]:
    name, sep, fld = axis.rpartition(".")
    if not sep or not name or not fld:
        raise ConfigError(f"Sweep axis must look like '<name>.<field>', got '{axis}'")
    return name, fld


def sweep_values(start: float, stop: float, count: int) -> List[float]:
    return [float(v) for v in np.linspace(start, stop, count)] if count > 0 else []


def _with_value(entry: Union[HardyProblemConfig, InequalityConfig], fld: str, value: float):
    if isinstance(entry, InequalityConfig) and fld in entry.params:
        return entry.model_copy(update={"params": {**entry.params, fld: value}})
    if fld not in type(entry).model_fields or fld in ("name", "space", "kind"):
        raise ConfigError(f"'{entry.name}' has no numeric field '{fld}'")
    if not isinstance(getattr(entry, fld), (int, float)) or isinstance(getattr(entry, fld), bool):
        raise ConfigError(f"'{entry.name}.{fld}' is not numeric")
    return entry.model_copy(update={fld: value})


def _sweep_point(config: ExperimentConfig, entry, options: RunOptions, index: int) -> Dict[str, Any]:
    """verdict and admissibility of one sampled value."""
    if isinstance(entry, HardyProblemConfig):
        item = _problem_item(config, entry)
        report = _b_report(item, options.tol)
        value = report.to_record()["value"]
        return {"admissible": True, "verdict": "finite" if report.is_finite else "divergent", "measure": value}

    item = _inequality_item(config, entry)
    admissibility = validate(item.spec)
    point = {"admissible": admissibility.admissible, "violations": admissibility.violations}
    if item.spec.kind in CRITICAL_KINDS:
        analog = critical_b2_analog(item.spec, options.tol)
        point["measure"] = analog.to_record()["value"]
        q_limit = (item.spec.r - 1.0) * item.spec.p_conj
        if math.isclose(item.spec.q, q_limit, rel_tol=0.0, abs_tol=1e-12):
            point["verdict"] = RatioVerdict.INCONCLUSIVE.value
        else:
            point["verdict"] = "bounded" if analog.is_finite else "unbounded"
    elif item.spec.kind in (InequalityKind.HARDY_SOBOLEV, InequalityKind.HARDY,
                            InequalityKind.CKN, InequalityKind.GN) and entry.grid is not None:
        report = run_check_spec(item, item_seed(options.seed, index), options.tol)
        point["measure"] = report.max_ratio
        point["verdict"] = report.verdict.value
    else:
        point["verdict"] = "admissible" if admissibility.admissible else "inadmissible"
    return point


def run_sweep(config: ExperimentConfig, options: RunOptions, axis: Optional[str] = None,
              span: Optional[Tuple[float, float, int]] = None) -> List[ItemResult]:
    """One row per sampled value; ``transition`` marks a verdict change from the row before."""
    sweep = config.sweep
    axis = axis or (sweep.axis if sweep is not None else None)
    if axis is None:
        raise ConfigError("No sweep axis: give --axis or a 'sweep' section")
    if span is None:
        if sweep is None:
            raise ConfigError("No sweep range: give --range or a 'sweep' section")
        span = (sweep.start, sweep.stop, sweep.count)
    name, fld = parse_axis(axis)
    entry = config.entry(name)
    values = sweep_values(*span)
    # resolve every sampled entry first so config errors surface before any numerics
    entries = [_with_value(entry, fld, v) for v in values]
    for sampled in entries:
        if isinstance(sampled, HardyProblemConfig):
            config.build_problem(sampled)
        else:
            config.build_spec(sampled)

    def point(index: int, sampled) -> ItemResult:
        row = {"axis": axis, "value": values[index], **_sweep_point(config, sampled, options, index)}
        return ItemResult(f"{name}[{index}]", row, row["verdict"], True)

    results = run_items(entries, point, options.jobs)
    previous = None
    for result, value in zip(results, values):
        result.record.setdefault("axis", axis)
        result.record.setdefault("value", value)
        result.record["transition"] = previous is not None and result.verdict != previous
        previous = result.verdict
    return results


def sweep_plot(results: Sequence[ItemResult]) -> List[Tuple[float, float]]:
    return [(r.record["value"], VERDICT_LEVEL.get(r.verdict, math.nan)) for r in results]
