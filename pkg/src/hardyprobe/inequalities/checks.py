# src/hardyprobe/inequalities/checks.py
"""Numerical ratio checks of the Sobolev-type inequalities in convolution form.

Every Sobolev norm ||f||_{L^p_alpha} is realized as ||g||_p with f = g * A_alpha on a uniform
grid of the Euclidean model.  "Bounded" means the largest ratio is stable across dyadic
refinements (or along a concentrating sequence); "Unbounded" means it grows geometrically.
"""

import logging
import math
from enum import Enum
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, Field

from ..errors import ParameterError
from ..hardy_core import BReport, Direction, HardyProblem, compute_B2
from ..kernels import KernelBound
from ..polar_space import DensityKind
from ..weights import WeightExpr
from .grid import (
    GridInput,
    UniformGrid,
    cell_weight_averages,
    check_resolution,
    concentrate_width,
    pairwise_kernel,
    point_weights,
    random_bumps,
    synthesize,
    unit_bump,
    weighted_norm,
)
from .specs import InequalityKind, InequalitySpec

logger = logging.getLogger(__name__)

STABILITY_BAND = 0.10
GROWTH_FACTOR = 2.0
DEFAULT_LEVELS = 4
DEFAULT_ZOOM = 16.0
# relative rounding allowed in exact finite-sum inequalities
HOLDER_ROUNDING = 64 * np.finfo(float).eps
REGION_CHUNK = 2048


class RatioVerdict(str, Enum):
    BOUNDED = "bounded"
    UNBOUNDED = "unbounded"
    INCONCLUSIVE = "inconclusive"


class CheckMode(str, Enum):
    REFINE = "refine"
    CONCENTRATE = "concentrate"


class RatioReport(BaseModel):
    """Ratios of one check across refinement (or concentration) levels."""
    name: str
    check: str
    mode: str
    levels: List[float] = Field(default_factory=list)
    ratios: List[float] = Field(default_factory=list)
    refinement_trend: List[float] = Field(default_factory=list)
    max_ratio: float = 0.0
    verdict: RatioVerdict = RatioVerdict.INCONCLUSIVE
    notes: Dict[str, Any] = Field(default_factory=dict)

    def to_record(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")

    def to_rows(self) -> List[Dict[str, Any]]:
        """One row per level."""
        return [
            {"name": self.name, "check": self.check, "mode": self.mode, "level": level,
             "max_ratio": value, "verdict": self.verdict.value}
            for level, value in zip(self.levels, self.refinement_trend)
        ]


def classify_trend(trend: Sequence[float], band: float = STABILITY_BAND,
                   growth: float = GROWTH_FACTOR) -> RatioVerdict:
    """Unbounded after two successive growth factors >= growth; Bounded when the trend stays
    within the relative band or never increases; Inconclusive otherwise."""
    values = [float(v) for v in trend]
    if not values or all(v == 0.0 for v in values):
        return RatioVerdict.BOUNDED
    if any(math.isinf(v) for v in values):
        return RatioVerdict.UNBOUNDED
    run = 0
    for before, after in zip(values, values[1:]):
        factor = math.inf if before == 0.0 else after / before
        run = run + 1 if factor >= growth else 0
        if run >= 2:
            return RatioVerdict.UNBOUNDED
    top = max(values)
    if (top - min(values)) <= band * top:
        return RatioVerdict.BOUNDED
    if all(after <= before * (1.0 + 1e-9) for before, after in zip(values, values[1:])):
        return RatioVerdict.BOUNDED
    return RatioVerdict.INCONCLUSIVE


def _safe_ratio(top: float, bottom: float) -> float:
    if top == 0.0:
        return 0.0
    if bottom == 0.0:
        return math.inf
    return top / bottom


# --- set-up helpers -----------------------------------------------------------------------


def grid_dim(spec: InequalitySpec) -> int:
    if spec.space.kind != DensityKind.EUCLIDEAN:
        raise ParameterError(f"Convolution checks run on the Euclidean model, got {spec.space.name}")
    d = spec.dim
    if d not in (1.0, 2.0):
        raise ParameterError(f"Convolution checks need d in {{1, 2}}, got d={d:g}")
    return int(d)


def default_kernel(spec: InequalitySpec, alpha: float) -> Optional[KernelBound]:
    """Noncompact majorant of order alpha; no kernel (the identity) for alpha = 0."""
    if alpha == 0.0:
        return None
    return KernelBound.noncompact(alpha, spec.dim, char_rate=spec.char_rate)


def _default_inputs(dim: int, mode: CheckMode, grid: UniformGrid, seed: int) -> List[GridInput]:
    if mode == CheckMode.CONCENTRATE:
        return [unit_bump(dim, width=concentrate_width(grid))]
    rng = np.random.default_rng(np.random.SeedSequence([seed, dim]))
    return [unit_bump(dim), random_bumps(rng, dim, 3, grid.half_width), random_bumps(rng, dim, 2, grid.half_width)]


def _level_plan(grid: UniformGrid, inputs: Sequence[GridInput], mode: CheckMode, levels: int,
                zoom: float) -> List[Tuple[float, UniformGrid, List[GridInput]]]:
    plan = []
    for k in range(levels):
        if mode == CheckMode.REFINE:
            plan.append((float(grid.points * 2 ** k), grid.refined(2 ** k), list(inputs)))
        else:
            factor = zoom ** k
            plan.append((factor, grid.zoomed(factor), [g.dilated(factor) for g in inputs]))
    return plan


Measure = Callable[[np.ndarray, np.ndarray, UniformGrid], Tuple[float, Dict[str, float]]]


def _run_levels(name: str, check: str, spec: InequalitySpec, kernel: Optional[KernelBound],
                inputs: Optional[Sequence[GridInput]], grid: Optional[UniformGrid], mode: CheckMode,
                levels: int, zoom: float, seed: int, measure: Measure) -> RatioReport:
    dim = grid_dim(spec)
    mode = CheckMode(mode)
    grid = grid or UniformGrid(dim)
    if grid.dim != dim:
        raise ParameterError(f"Grid dimension {grid.dim} does not match d={dim}")
    inputs = list(inputs) if inputs is not None else _default_inputs(dim, mode, grid, seed)

    level_values, trend, last, extras = [], [], [], {}
    for level, level_grid, level_inputs in _level_plan(grid, inputs, mode, levels, zoom):
        ratios = []
        for g_input in level_inputs:
            check_resolution(kernel, level_grid, g_input.scale)
            g = g_input.sample(level_grid)
            f = synthesize(g, kernel, level_grid)
            value, notes = measure(f, g, level_grid)
            ratios.append(value)
            for key, note in notes.items():
                extras[key] = min(extras.get(key, note), note)
        level_values.append(level)
        trend.append(max(ratios, default=0.0))
        last = ratios
        logger.debug(f"{name} {check} level {level:g}: max ratio {trend[-1]:.6g}")

    report = RatioReport(
        name=name,
        check=check,
        mode=mode.value,
        levels=level_values,
        ratios=last,
        refinement_trend=trend,
        max_ratio=max(trend, default=0.0),
        verdict=classify_trend(trend),
        notes=extras,
    )
    logger.info(f"{name} {check}: max ratio {report.max_ratio:.6g} -> {report.verdict.value}")
    return report


# --- Hardy-Sobolev ------------------------------------------------------------------------


def _embedding_symbols(spec: InequalitySpec) -> Tuple[float, float, float, float]:
    """(p, q, alpha, beta) of the Hardy-Sobolev form of the spec."""
    if spec.kind in (InequalityKind.HARDY_SOBOLEV, InequalityKind.UNCERTAINTY):
        return spec.p, spec.q, spec.alpha, spec.beta
    if spec.kind == InequalityKind.HARDY:
        return spec.p, spec.p, spec.alpha, spec.alpha * spec.p
    raise ParameterError(f"No Hardy-Sobolev form for {spec.kind.value}")


def check_hardy_sobolev(spec: InequalitySpec, inputs: Optional[Sequence[GridInput]] = None,
                        kernel: Optional[KernelBound] = None, grid: Optional[UniformGrid] = None,
                        mode: CheckMode = CheckMode.REFINE, levels: int = DEFAULT_LEVELS,
                        zoom: float = DEFAULT_ZOOM, seed: int = 0) -> RatioReport:
    """||f / |x|^(beta/q)||_q / ||g||_p for f = g * A_alpha."""
    p, q, alpha, beta = _embedding_symbols(spec)
    kernel = kernel if kernel is not None else default_kernel(spec, alpha)
    weight = WeightExpr(power=-beta)

    def measure(f, g, grid):
        lhs = weighted_norm(f, q, grid, cell_weight_averages(weight, grid))
        return _safe_ratio(lhs, weighted_norm(g, p, grid)), {}

    return _run_levels(spec.label, "hardy_sobolev", spec, kernel, inputs, grid, mode, levels, zoom, seed, measure)


# --- critical Hardy -----------------------------------------------------------------------


def critical_weight(spec: InequalitySpec) -> WeightExpr:
    """omega_r^-1 = log(e + 1/|x|)^-r |x|^-d."""
    return WeightExpr(power=-spec.dim, logplus=-spec.r)


def critical_b2_analog(spec: InequalitySpec, tol: float = 1e-9) -> BReport:
    """B2 of the outer problem with Phi = omega_r^-1 and Psi_d = A_{d/p}(r/2)^p'.

    It is finite exactly when the logarithmic exponents balance, q <= (r-1) p'.
    """
    if spec.kind not in (InequalityKind.CRITICAL_HARDY, InequalityKind.UNCERTAINTY_CRITICAL):
        raise ParameterError(f"The B2 analog needs a critical spec, got {spec.kind.value}")
    kernel = KernelBound.noncompact(spec.dim / spec.p, spec.dim, char_rate=spec.char_rate,
                                    growth_rate=spec.space.global_rate)
    problem = HardyProblem.with_dual(
        spec.space, spec.p, spec.q, Direction.OUTER,
        phi=critical_weight(spec),
        psi_dual=kernel.as_weight(2.0, spec.p_conj),
        name=f"{spec.label}:b2-analog",
    )
    return compute_B2(problem, tol)


def check_critical_hardy(spec: InequalitySpec, inputs: Optional[Sequence[GridInput]] = None,
                         kernel: Optional[KernelBound] = None, grid: Optional[UniformGrid] = None,
                         mode: CheckMode = CheckMode.REFINE, levels: int = DEFAULT_LEVELS,
                         zoom: float = DEFAULT_ZOOM, seed: int = 0, tol: float = 1e-9) -> RatioReport:
    """||f / (log(e + 1/|x|)^(r/q) |x|^(d/q))||_q / ||g||_p for f = g * A_{d/p}.

    Grid ratios cannot see logarithmic blow-up, so the verdict follows the B2 analog: a
    divergent analog is Unbounded, a finite one leaves the refinement verdict in place, and
    the endpoint q = (r-1) p' gets no verdict.
    """
    if spec.kind != InequalityKind.CRITICAL_HARDY:
        raise ParameterError(f"check_critical_hardy needs a critical_hardy spec, got {spec.kind.value}")
    kernel = kernel if kernel is not None else default_kernel(spec, spec.dim / spec.p)
    weight = critical_weight(spec)

    def measure(f, g, grid):
        lhs = weighted_norm(f, spec.q, grid, cell_weight_averages(weight, grid))
        return _safe_ratio(lhs, weighted_norm(g, spec.p, grid)), {}

    report = _run_levels(spec.label, "critical_hardy", spec, kernel, inputs, grid, mode, levels, zoom, seed, measure)
    analog = critical_b2_analog(spec, tol)
    q_limit = (spec.r - 1.0) * spec.p_conj
    report.notes["b2_analog"] = analog.to_record()["value"]
    report.notes["q_limit"] = q_limit
    if math.isclose(spec.q, q_limit, rel_tol=0.0, abs_tol=1e-12):
        report.notes["endpoint"] = True
        report.verdict = RatioVerdict.INCONCLUSIVE
    elif not analog.is_finite:
        report.verdict = RatioVerdict.UNBOUNDED
    return report


# --- Caffarelli-Kohn-Nirenberg ------------------------------------------------------------


class HolderStep(BaseModel):
    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return self.rhs - self.lhs

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + HOLDER_ROUNDING)


def _ckn_symbols(spec: InequalitySpec) -> Tuple[float, float]:
    if spec.kind == InequalityKind.CKN:
        return spec.a, spec.b
    if spec.kind == InequalityKind.GN:
        return 0.0, 0.0
    raise ParameterError(f"check_ckn needs a ckn or gn spec, got {spec.kind.value}")


def ckn_holder_step(f: np.ndarray, grid: UniformGrid, spec: InequalitySpec) -> HolderStep:
    """||x|^a f||_r <= ||f / |x|^((b(1-theta)-a)/theta)||_{q~}^theta ||x|^b f||_q^(1-theta), node weights."""
    a, b = _ckn_symbols(spec)
    theta, q, r = spec.theta, spec.q, spec.r
    lhs = weighted_norm(f, r, grid, point_weights(WeightExpr(power=a * r), grid))
    if theta == 1.0:
        return HolderStep(lhs=lhs, rhs=lhs)
    q_tilde = spec.q_tilde
    shift = (b * (1.0 - theta) - a) / theta
    first = weighted_norm(f, q_tilde, grid, point_weights(WeightExpr(power=-q_tilde * shift), grid))
    second = weighted_norm(f, q, grid, point_weights(WeightExpr(power=b * q), grid))
    return HolderStep(lhs=lhs, rhs=first ** theta * second ** (1.0 - theta))


def check_ckn(spec: InequalitySpec, inputs: Optional[Sequence[GridInput]] = None,
              kernel: Optional[KernelBound] = None, grid: Optional[UniformGrid] = None,
              mode: CheckMode = CheckMode.REFINE, levels: int = DEFAULT_LEVELS,
              zoom: float = DEFAULT_ZOOM, seed: int = 0) -> RatioReport:
    """||x|^a f||_r / (||g||_p^theta ||x|^b f||_q^(1-theta)) for f = g * A_alpha.

    The Hoelder step of the reduction to Hardy-Sobolev is evaluated on the same data; the
    smallest gap is kept in the notes.
    """
    a, b = _ckn_symbols(spec)
    theta = spec.theta
    kernel = kernel if kernel is not None else default_kernel(spec, spec.alpha)
    # with a = -beta/r this is the Hardy-Sobolev weight |x|^-beta
    lhs_weight = WeightExpr(power=a * spec.r)
    rhs_weight = WeightExpr(power=b * spec.q)

    def measure(f, g, grid):
        lhs = weighted_norm(f, spec.r, grid, cell_weight_averages(lhs_weight, grid))
        sobolev = weighted_norm(g, spec.p, grid)
        lebesgue = weighted_norm(f, spec.q, grid, cell_weight_averages(rhs_weight, grid))
        step = ckn_holder_step(f, grid, spec)
        ratio = _safe_ratio(lhs, sobolev ** theta * lebesgue ** (1.0 - theta))
        return ratio, {"holder_gap": step.gap, "holder_holds": float(step.holds)}

    return _run_levels(spec.label, spec.kind.value, spec, kernel, inputs, grid, mode, levels, zoom, seed, measure)


# --- Hardy-Littlewood-Sobolev -------------------------------------------------------------


def check_hls(spec: InequalitySpec, f_inputs: Optional[Sequence[GridInput]] = None,
              g_inputs: Optional[Sequence[GridInput]] = None, kernel: Optional[KernelBound] = None,
              grid: Optional[UniformGrid] = None, levels: int = 2, seed: int = 0) -> RatioReport:
    """|sum f(x) g(y) A_{a2}(x-y) |x|^-a1 |y|^-beta| / (||f_density||_p ||g_density||_q).

    f = f_density * A_alpha and g = g_density * A_beta.  The double sum is the pairing of
    f |x|^-a1 with the convolution of g |y|^-beta against A_{a2}.
    """
    if spec.kind != InequalityKind.HLS:
        raise ParameterError(f"check_hls needs an hls spec, got {spec.kind.value}")
    if grid_dim(spec) != 1:
        raise ParameterError("The bilinear check runs in d = 1")
    if spec.char_rate > 0.0:
        raise ParameterError("Non-unimodular HLS specs are validation-only")
    grid = grid or UniformGrid(1)
    pairing_kernel = kernel if kernel is not None else default_kernel(spec, spec.a2)
    f_kernel = default_kernel(spec, spec.alpha)
    g_kernel = default_kernel(spec, spec.beta)
    f_inputs = list(f_inputs) if f_inputs is not None else [unit_bump(1), unit_bump(1, (-2.0,), 0.5)]
    g_inputs = list(g_inputs) if g_inputs is not None else [unit_bump(1, (1.0,)), unit_bump(1, (2.0,), 0.5)]
    if len(f_inputs) != len(g_inputs):
        raise ParameterError("HLS inputs come in pairs")
    x_weight = WeightExpr(power=-spec.a1)
    y_weight = WeightExpr(power=-spec.beta)

    level_values, trend, last = [], [], []
    for k in range(levels):
        level_grid = grid.refined(2 ** k)
        ratios = []
        for f_in, g_in in zip(f_inputs, g_inputs):
            for kern in (pairing_kernel, f_kernel, g_kernel):
                check_resolution(kern, level_grid, min(f_in.scale, g_in.scale))
            f_density, g_density = f_in.sample(level_grid), g_in.sample(level_grid)
            f = synthesize(f_density, f_kernel, level_grid)
            g = synthesize(g_density, g_kernel, level_grid)
            inner = synthesize(g * cell_weight_averages(y_weight, level_grid), pairing_kernel, level_grid)
            pairing = abs(float(np.sum(f * cell_weight_averages(x_weight, level_grid) * inner)) * level_grid.cell_volume)
            rhs = weighted_norm(f_density, spec.p, level_grid) * weighted_norm(g_density, spec.q, level_grid)
            ratios.append(_safe_ratio(pairing, rhs))
        level_values.append(float(level_grid.points))
        trend.append(max(ratios, default=0.0))
        last = ratios

    report = RatioReport(name=spec.label, check="hls", mode=CheckMode.REFINE.value, levels=level_values,
                         ratios=last, refinement_trend=trend, max_ratio=max(trend, default=0.0),
                         verdict=classify_trend(trend))
    logger.info(f"{spec.label} hls: max ratio {report.max_ratio:.6g} -> {report.verdict.value}")
    return report


# --- uncertainty principles ---------------------------------------------------------------


class UncertaintyResult(BaseModel):
    lhs: float
    rhs: float
    hardy_constant: float
    holder_lhs: float

    @property
    def holder_holds(self) -> bool:
        return self.holder_lhs >= self.rhs * (1.0 - HOLDER_ROUNDING)

    @property
    def passed(self) -> bool:
        return self.lhs * self.hardy_constant >= self.rhs * (1.0 - HOLDER_ROUNDING)

    def to_record(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "hardy_constant": self.hardy_constant,
                "holder_lhs": self.holder_lhs, "holder_holds": self.holder_holds, "pass": self.passed}


def holder_core(f: np.ndarray, w: np.ndarray, q: float, grid: UniformGrid) -> Tuple[float, float]:
    """(||f/w||_q ||w f||_q', ||f||_2^2) for node weights w > 0."""
    q_conj = q / (q - 1.0)
    left = weighted_norm(f / w, q, grid) * weighted_norm(w * f, q_conj, grid)
    return left, float(np.sum(np.abs(f) ** 2) * grid.cell_volume)


def uncertainty_weight(spec: InequalitySpec) -> WeightExpr:
    """|x|^(beta/q), or log(e + 1/|x|)^(r/q) |x|^(d/q) in the critical case."""
    if spec.kind == InequalityKind.UNCERTAINTY:
        return WeightExpr(power=spec.beta / spec.q)
    if spec.kind == InequalityKind.UNCERTAINTY_CRITICAL:
        return WeightExpr(power=spec.dim / spec.q, logplus=spec.r / spec.q)
    raise ParameterError(f"check_uncertainty needs an uncertainty spec, got {spec.kind.value}")


def check_uncertainty(spec: InequalitySpec, g_input: Optional[GridInput] = None,
                      kernel: Optional[KernelBound] = None,
                      grid: Optional[UniformGrid] = None) -> UncertaintyResult:
    """||g||_p ||w f||_q' against ||f||_2^2 for f = g * A.

    The Hardy constant ||f/w||_q / ||g||_p is measured on the same data, so the inequality
    reduces to the finite-sum Hoelder step and is checked without slack.
    """
    w_expr = uncertainty_weight(spec)
    dim = grid_dim(spec)
    grid = grid or UniformGrid(dim)
    if kernel is None:
        alpha = spec.alpha if spec.kind == InequalityKind.UNCERTAINTY else spec.dim / spec.p
        kernel = default_kernel(spec, alpha)
    g_input = g_input or unit_bump(dim)
    check_resolution(kernel, grid, g_input.scale)
    g = g_input.sample(grid)
    f = synthesize(g, kernel, grid)
    w = point_weights(w_expr, grid)
    sobolev = weighted_norm(g, spec.p, grid)
    left, energy = holder_core(f, w, spec.q, grid)
    hardy = _safe_ratio(weighted_norm(f / w, spec.q, grid), sobolev)
    result = UncertaintyResult(
        lhs=sobolev * weighted_norm(w * f, spec.q / (spec.q - 1.0), grid),
        rhs=energy,
        hardy_constant=hardy,
        holder_lhs=left,
    )
    logger.info(f"{spec.label} uncertainty: lhs {result.lhs:.6g}, rhs {result.rhs:.6g}, pass={result.passed}")
    return result


# --- region decomposition -----------------------------------------------------------------


class RegionShares(BaseModel):
    """The three region contributions of the q-th power of the weighted norm."""
    m1: float
    m2: float
    m3: float
    lhs: float
    q: float
    critical: bool = False

    @property
    def total(self) -> float:
        return self.m1 + self.m2 + self.m3

    @property
    def bound(self) -> float:
        return 3.0 ** self.q * self.total

    @property
    def holds(self) -> bool:
        return self.lhs <= self.bound * (1.0 + 1e-12)

    def shares(self) -> Dict[str, float]:
        total = self.total
        if total == 0.0:
            return {"m1_share": 0.0, "m2_share": 0.0, "m3_share": 0.0}
        return {"m1_share": self.m1 / total, "m2_share": self.m2 / total, "m3_share": self.m3 / total}

    def to_record(self) -> Dict[str, Any]:
        record = {"m1": self.m1, "m2": self.m2, "m3": self.m3, "lhs": self.lhs, "bound": self.bound,
                  "holds": self.holds, "critical": self.critical}
        record.update(self.shares())
        return record


def _region_setup(spec: InequalitySpec) -> Tuple[float, float, WeightExpr, bool]:
    """(q, kernel order, weight, critical) of the spec."""
    if spec.kind == InequalityKind.CRITICAL_HARDY:
        return spec.q, spec.dim / spec.p, critical_weight(spec), True
    _, q, alpha, beta = _embedding_symbols(spec)
    return q, alpha, WeightExpr(power=-beta), False


def region_decomposition(spec: InequalitySpec, g_input: Optional[GridInput] = None,
                         kernel: Optional[KernelBound] = None, grid: Optional[UniformGrid] = None,
                         x_window: Optional[Tuple[float, float]] = None) -> RegionShares:
    """Splits f = g * A at every x into the parts from 2|y| < |x|, |x| <= 2|y| < 4|x| and
    |y| >= 2|x|, and sums the q-th powers of each part against the weight.

    ``x_window`` restricts the outer sum to |x| in [lo, hi].
    """
    dim = grid_dim(spec)
    q, alpha, weight, critical = _region_setup(spec)
    kernel = kernel if kernel is not None else default_kernel(spec, alpha)
    if grid is None:
        grid = UniformGrid(1) if dim == 1 else UniformGrid(2, half_width=4.0, points=96)
    g_input = g_input or unit_bump(dim)
    check_resolution(kernel, grid, g_input.scale)

    g = g_input.sample(grid).ravel()
    radii = grid.radii().ravel()
    w = cell_weight_averages(weight, grid).ravel()
    cols = np.flatnonzero(g)
    rows = np.arange(radii.size)
    if x_window is not None:
        lo, hi = x_window
        rows = rows[(radii >= lo) & (radii <= hi)]

    totals = np.zeros(4)
    ry = radii[cols]
    for start in range(0, rows.size, REGION_CHUNK):
        chunk = rows[start:start + REGION_CHUNK]
        contrib = pairwise_kernel(kernel, grid, chunk, cols) * g[cols][None, :] * grid.cell_volume
        rx = radii[chunk][:, None]
        inner = 2.0 * ry[None, :] < rx
        outer = ry[None, :] >= 2.0 * rx
        middle = ~(inner | outer)
        parts = [np.sum(contrib * mask, axis=1) for mask in (inner, middle, outer)]
        weights = w[chunk] * grid.cell_volume
        totals[0] += np.sum(parts[0] ** q * weights)
        totals[1] += np.sum(parts[1] ** q * weights)
        totals[2] += np.sum(parts[2] ** q * weights)
        totals[3] += np.sum((parts[0] + parts[1] + parts[2]) ** q * weights)

    shares = RegionShares(m1=totals[0], m2=totals[1], m3=totals[2], lhs=totals[3], q=q, critical=critical)
    if not shares.holds:
        logger.warning(f"Region bound violated for {spec.label}: {shares.lhs:.6g} > {shares.bound:.6g}")
    return shares
