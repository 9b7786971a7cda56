# src/hardyprobe/hardy_core.py
"""Characterizing constants of the two-weight integral Hardy inequalities on polar spaces.

For radial weights every functional collapses to one-dimensional integrals against the
radial density S of the space.  With Psi_d = Psi^(1-p') and 1/g = 1/q - 1/p:

  B1 = sup_R (int_R^inf Phi S)^(1/q) (int_0^R Psi_d S)^(1/p')             p <= q, inner
  B2 = sup_R (int_0^R Phi S)^(1/q) (int_R^inf Psi_d S)^(1/p')             p <= q, outer
  B3 = int (int_r^inf Phi S)^(g/q) (int_0^r Psi_d S)^(g/q') Psi_d S dr    q < p, inner
  B4 = int (int_0^r Phi S)^(g/q) (int_r^inf Psi_d S)^(g/q') Psi_d S dr    q < p, outer

Endpoint behaviour is decided from the growth classes of the weights before any numerics,
so slowly divergent functionals (log-rate blow-up) are reported as Divergent rather than
as a large finite number.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import End, Growth, ball_integral, complement_integral, converges_at
from .errors import AdmissibilityError, ParameterError, ZeroDenominator
from .polar_space import PolarSpace
from .quadrature import (
    DEFAULT_TOL,
    Divergent,
    Integrand,
    NodeGrid,
    QuadResult,
    Value,
    head_profile,
    integrate,
    log_node_grid,
    sup_search,
    tail_profile,
)
from .weights import Weight, radial_integrand, weight_to_config

if TYPE_CHECKING:
    from .test_functions import RadialTestFunction

logger = logging.getLogger(__name__)

R_MIN = 1e-8
R_MAX = 1e8
# largest rate * r kept on a grid; exp of it times a second such factor stays finite
RATE_BUDGET = 250.0
GRID_CELLS = 4096
GRID_ORDER = 8
MAX_REFINEMENTS = 3
REFINE_TOL = 1e-8
DIVERGENCE_RATIO = 1e3


class Direction(str, Enum):
    INNER = "inner"
    OUTER = "outer"


class Which(str, Enum):
    B1 = "B1"
    B2 = "B2"
    B3 = "B3"
    B4 = "B4"


@dataclass(frozen=True)
class HardyProblem:
    """Two-weight Hardy inequality on a polar space.

    ``psi_dual`` is Psi^(1-p'); it is derived from ``psi`` unless given explicitly through
    ``with_dual``, in which case the stored dual is used as-is.
    """
    space: PolarSpace
    p: float
    q: float
    direction: Direction
    phi: Weight
    psi: Weight
    name: str = ""
    psi_dual: Optional[Weight] = None

    def __post_init__(self):
        if not self.p > 1.0:
            raise ParameterError(f"Exponent p must exceed 1, got {self.p}")
        if not self.q > 0.0:
            raise ParameterError(f"Exponent q must be positive, got {self.q}")
        if not isinstance(self.direction, Direction):
            object.__setattr__(self, "direction", Direction(self.direction))
        if self.psi_dual is None:
            object.__setattr__(self, "psi_dual", self.psi.power_transform(1.0 - self.p_conj))

    @classmethod
    def with_dual(cls, space: PolarSpace, p: float, q: float, direction: Direction, phi: Weight,
                  psi_dual: Weight, name: str = "") -> "HardyProblem":
        if not p > 1.0:
            raise ParameterError(f"Exponent p must exceed 1, got {p}")
        p_conj = p / (p - 1.0)
        psi = psi_dual.power_transform(1.0 / (1.0 - p_conj))
        return cls(space, p, q, direction, phi, psi, name=name, psi_dual=psi_dual)

    @property
    def p_conj(self) -> float:
        return self.p / (self.p - 1.0)

    @property
    def q_conj(self) -> float:
        return self.q / (self.q - 1.0) if self.q > 1.0 else math.inf

    @property
    def gamma(self) -> float:
        """g with 1/g = 1/q - 1/p; infinite unless q < p."""
        if self.q >= self.p:
            return math.inf
        return 1.0 / (1.0 / self.q - 1.0 / self.p)

    @property
    def sandwich_factor(self) -> float:
        return self.p_conj ** (1.0 / self.p_conj) * self.p ** (1.0 / self.q)

    @property
    def label(self) -> str:
        return self.name or f"{self.space.name}:p={self.p:g},q={self.q:g},{self.direction.value}"

    def breakpoints(self) -> Tuple[float, ...]:
        points = set(self.phi.breakpoints()) | set(self.psi_dual.breakpoints()) | set(self.space.breakpoints())
        return tuple(sorted(points))

    def radial_range(self) -> Tuple[float, float]:
        """Grid range [R_MIN, r_hi] with r_hi cut so exponential factors stay representable."""
        rate = max(self.phi.max_rate(), self.psi_dual.max_rate()) + self.space.global_rate
        r_hi = R_MAX if rate == 0.0 else min(R_MAX, RATE_BUDGET / rate)
        return R_MIN, max(r_hi, 1e3 * R_MIN)

    def phi_class(self, end: End) -> Growth:
        return self.phi.growth(end) + self.space.density_growth(end)

    def dual_class(self, end: End) -> Growth:
        return self.psi_dual.growth(end) + self.space.density_growth(end)

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.label,
            "space": self.space.describe(),
            "p": self.p,
            "q": self.q,
            "direction": self.direction.value,
            "phi": weight_to_config(self.phi),
            "psi_dual": weight_to_config(self.psi_dual),
        }


def _json_value(value: Optional[Value]) -> Any:
    if value is None:
        return None
    if isinstance(value, Divergent):
        return "divergent"
    if not math.isfinite(value):
        return "divergent"
    return float(value)


@dataclass(frozen=True)
class BReport:
    which: Which
    value: Value
    argmax_R: Optional[float] = None
    error_estimate: float = 0.0
    sandwich_upper: Optional[Value] = None
    problem: str = ""

    @property
    def is_finite(self) -> bool:
        return not isinstance(self.value, Divergent)

    def to_record(self) -> Dict[str, Any]:
        return {
            "problem": self.problem,
            "which": self.which.value,
            "value": _json_value(self.value),
            "divergent_end": self.value.end.value if isinstance(self.value, Divergent) else None,
            "argmax": self.argmax_R,
            "error_estimate": self.error_estimate,
            "sandwich_upper": _json_value(self.sandwich_upper),
        }


def infer_which(pb: HardyProblem) -> Which:
    """B1/B2 for p <= q, B3/B4 for q < p; inner problems take the odd index."""
    if pb.p <= pb.q:
        return Which.B1 if pb.direction == Direction.INNER else Which.B2
    return Which.B3 if pb.direction == Direction.INNER else Which.B4


def _require(pb: HardyProblem, which: Which):
    direction = Direction.INNER if which in (Which.B1, Which.B3) else Direction.OUTER
    if pb.direction != direction:
        raise AdmissibilityError(f"{which.value} needs a {direction.value} problem, got {pb.direction.value}")
    if which in (Which.B1, Which.B2):
        if not (1.0 < pb.p <= pb.q):
            raise AdmissibilityError(f"{which.value} needs 1 < p <= q, got p={pb.p}, q={pb.q}")
    elif not (1.0 < pb.q < pb.p):
        raise AdmissibilityError(f"{which.value} needs 1 < q < p, got p={pb.p}, q={pb.q}")


def _mass(result: QuadResult) -> float:
    return float(result.value) if result.is_finite else math.inf


# --- Endpoint analysis --------------------------------------------------------------------


def _factor_divergence(pb: HardyProblem) -> Optional[Divergent]:
    """Divergent when one of the two weight factors is infinite for every radius."""
    if pb.direction == Direction.INNER:
        if not converges_at(pb.phi_class(End.INFINITY), End.INFINITY):
            return Divergent(End.INFINITY)
        if not converges_at(pb.dual_class(End.ZERO), End.ZERO):
            return Divergent(End.ZERO)
    else:
        if not converges_at(pb.phi_class(End.ZERO), End.ZERO):
            return Divergent(End.ZERO)
        if not converges_at(pb.dual_class(End.INFINITY), End.INFINITY):
            return Divergent(End.INFINITY)
    return None


def _factor_classes(pb: HardyProblem, end: End) -> Tuple[Growth, Growth]:
    """Classes of the Phi factor and the Psi_d factor as the radius approaches ``end``."""
    if pb.direction == Direction.INNER:
        return complement_integral(pb.phi_class(end), end), ball_integral(pb.dual_class(end), end)
    return ball_integral(pb.phi_class(end), end), complement_integral(pb.dual_class(end), end)


def sup_profile(pb: HardyProblem, end: End) -> Optional[Growth]:
    """Class of B(R) (B1 or B2) as R approaches ``end``; None if a factor is always infinite."""
    if _factor_divergence(pb) is not None:
        return None
    weight_part, dual_part = _factor_classes(pb, end)
    return weight_part * (1.0 / pb.q) + dual_part * (1.0 / pb.p_conj)


def integral_profile(pb: HardyProblem, end: End) -> Optional[Growth]:
    """Class of the B3/B4 integrand near ``end``; None if a factor is always infinite."""
    if _factor_divergence(pb) is not None:
        return None
    weight_part, dual_part = _factor_classes(pb, end)
    return weight_part * (pb.gamma / pb.q) + dual_part * (pb.gamma / pb.q_conj) + pb.dual_class(end)


def _symbolic_verdict(pb: HardyProblem, integral_form: bool) -> Optional[Divergent]:
    divergent = _factor_divergence(pb)
    if divergent is not None:
        return divergent
    for end in (End.ZERO, End.INFINITY):
        if integral_form:
            if not converges_at(integral_profile(pb, end), end):
                return Divergent(end)
        elif sup_profile(pb, end).is_unbounded(end):
            return Divergent(end)
    return None


# --- B1 / B2 ------------------------------------------------------------------------------


def _b_factors(pb: HardyProblem, radius: float, tol: float) -> Tuple[QuadResult, QuadResult]:
    breakpoints = pb.breakpoints()
    phi_f = radial_integrand(pb.phi, pb.space)
    dual_f = radial_integrand(pb.psi_dual, pb.space)
    if pb.direction == Direction.INNER:
        return (integrate(phi_f, radius, math.inf, tol, breakpoints),
                integrate(dual_f, 0.0, radius, tol, breakpoints))
    return (integrate(phi_f, 0.0, radius, tol, breakpoints),
            integrate(dual_f, radius, math.inf, tol, breakpoints))


def b_value(pb: HardyProblem, radius: float, tol: float = DEFAULT_TOL) -> Value:
    """B(R) of a B1/B2 problem at one radius."""
    weight_part, dual_part = _b_factors(pb, radius, tol)
    for part in (weight_part, dual_part):
        if not part.is_finite:
            return part.value
    return float(weight_part.value) ** (1.0 / pb.q) * float(dual_part.value) ** (1.0 / pb.p_conj)


def b_curve(pb: HardyProblem, radii: Sequence[float], tol: float = DEFAULT_TOL) -> List[Tuple[float, float]]:
    """Samples (R, B(R)); divergent samples are +inf."""
    if infer_which(pb) not in (Which.B1, Which.B2):
        raise AdmissibilityError("B(R) curves exist for p <= q problems only")
    curve = []
    for radius in radii:
        value = b_value(pb, float(radius), tol)
        curve.append((float(radius), math.inf if isinstance(value, Divergent) else float(value)))
    return curve


def _sup_constant(pb: HardyProblem, which: Which, tol: float) -> BReport:
    divergent = _symbolic_verdict(pb, integral_form=False)
    if divergent is not None:
        logger.info(f"{which.value} of {pb.label} diverges at {divergent.end.value}")
        return BReport(which, divergent, sandwich_upper=divergent, problem=pb.label)

    r_lo, r_hi = pb.radial_range()
    found = sup_search(lambda radius: b_value(pb, radius, tol), r_lo, r_hi, blowup=math.inf,
                       steady_growth=False)
    if not found.is_finite:
        return BReport(which, found.sup, sandwich_upper=found.sup, problem=pb.label)

    weight_part, dual_part = _b_factors(pb, found.argmax, tol)
    relative = 0.0
    if weight_part.value:
        relative += weight_part.abs_error_estimate / (pb.q * float(weight_part.value))
    if dual_part.value:
        relative += dual_part.abs_error_estimate / (pb.p_conj * float(dual_part.value))
    value = float(found.sup)
    logger.info(f"{which.value} of {pb.label} = {value:.10g} at R={found.argmax:.6g}")
    return BReport(
        which,
        value,
        argmax_R=found.argmax,
        error_estimate=value * relative,
        sandwich_upper=pb.sandwich_factor * value,
        problem=pb.label,
    )


def compute_B1(pb: HardyProblem, tol: float = DEFAULT_TOL) -> BReport:
    _require(pb, Which.B1)
    return _sup_constant(pb, Which.B1, tol)


def compute_B2(pb: HardyProblem, tol: float = DEFAULT_TOL) -> BReport:
    _require(pb, Which.B2)
    return _sup_constant(pb, Which.B2, tol)


# --- B3 / B4 ------------------------------------------------------------------------------


def problem_grid(pb: HardyProblem, cells: int = GRID_CELLS, extra: Sequence[float] = (),
                 cover: Optional[float] = None) -> NodeGrid:
    """Node grid over the problem's radial range, stretched to reach ``cover`` if given."""
    r_lo, r_hi = pb.radial_range()
    if cover is not None and math.isfinite(cover):
        r_hi = max(r_hi, cover)
    return log_node_grid(r_lo, r_hi, cells, GRID_ORDER, tuple(pb.breakpoints()) + tuple(extra))


@dataclass
class WeightSamples:
    """Phi S and Psi_d S on a grid together with their masses beyond the grid ends."""
    grid: NodeGrid
    log_phi: np.ndarray
    log_dual: np.ndarray
    phi_head: float
    phi_tail: float
    dual_head: float
    dual_tail: float

    @property
    def phi(self) -> np.ndarray:
        return np.exp(self.log_phi)

    @property
    def dual(self) -> np.ndarray:
        return np.exp(self.log_dual)

    def ball(self, which: str) -> np.ndarray:
        """int_0^r of Phi S ("phi") or Psi_d S ("dual") at every node."""
        values, head = (self.phi, self.phi_head) if which == "phi" else (self.dual, self.dual_head)
        return self.grid.forward(values, head)

    def complement(self, which: str) -> np.ndarray:
        """int_r^inf of Phi S or Psi_d S at every node."""
        values, tail = (self.phi, self.phi_tail) if which == "phi" else (self.dual, self.dual_tail)
        return self.grid.backward(values, tail)


def sample_weights(pb: HardyProblem, grid: NodeGrid, tol: float = DEFAULT_TOL) -> WeightSamples:
    nodes = grid.nodes
    log_density = pb.space.log_density(nodes)
    phi_f = radial_integrand(pb.phi, pb.space)
    dual_f = radial_integrand(pb.psi_dual, pb.space)
    breakpoints = pb.breakpoints()
    return WeightSamples(
        grid=grid,
        log_phi=pb.phi.log_eval(nodes) + log_density,
        log_dual=pb.psi_dual.log_eval(nodes) + log_density,
        phi_head=_mass(integrate(phi_f, 0.0, grid.r_lo, tol, breakpoints)),
        phi_tail=_mass(integrate(phi_f, grid.r_hi, math.inf, tol, breakpoints)),
        dual_head=_mass(integrate(dual_f, 0.0, grid.r_lo, tol, breakpoints)),
        dual_tail=_mass(integrate(dual_f, grid.r_hi, math.inf, tol, breakpoints)),
    )


def _log_power(x, t: float):
    with np.errstate(divide="ignore"):
        return t * np.log(x)


def _integral_on_grid(pb: HardyProblem, cells: int, tol: float) -> float:
    grid = problem_grid(pb, cells)
    w = sample_weights(pb, grid, tol)
    a, b = pb.gamma / pb.q, pb.gamma / pb.q_conj
    phi_total = grid.integral(w.phi)
    dual_total = grid.integral(w.dual)
    if pb.direction == Direction.INNER:
        outer, inner = w.complement("phi"), w.ball("dual")
        at_lo = (w.phi_tail + phi_total, w.dual_head)
        at_hi = (w.phi_tail, w.dual_head + dual_total)
    else:
        outer, inner = w.ball("phi"), w.complement("dual")
        at_lo = (w.phi_head, w.dual_tail + dual_total)
        at_hi = (w.phi_head + phi_total, w.dual_tail)

    with np.errstate(over="ignore", under="ignore", invalid="ignore"):
        body = grid.integral(np.exp(_log_power(outer, a) + _log_power(inner, b) + w.log_dual))

    pieces = []
    for end, radius, (outer_cut, inner_cut) in ((End.ZERO, grid.r_lo, at_lo), (End.INFINITY, grid.r_hi, at_hi)):
        log_cut = (float(_log_power(outer_cut, a)) + float(_log_power(inner_cut, b))
                   + float(pb.psi_dual.log_eval(radius)) + float(pb.space.log_density(radius)))
        value_at_cut = math.exp(log_cut) if log_cut > -745.0 else 0.0
        profile = head_profile if end == End.ZERO else tail_profile
        pieces.append(profile(value_at_cut, radius, integral_profile(pb, end)))
    logger.debug(f"{pb.label}: grid body {body:.6g}, head {pieces[0]:.3g}, tail {pieces[1]:.3g} ({cells} cells)")
    return body + pieces[0] + pieces[1]


def _integral_constant(pb: HardyProblem, which: Which, tol: float) -> BReport:
    divergent = _symbolic_verdict(pb, integral_form=True)
    if divergent is not None:
        logger.info(f"{which.value} of {pb.label} diverges at {divergent.end.value}")
        return BReport(which, divergent, problem=pb.label)

    cells = GRID_CELLS
    value = _integral_on_grid(pb, cells, tol)
    error = math.inf
    for _ in range(MAX_REFINEMENTS):
        cells *= 2
        refined = _integral_on_grid(pb, cells, tol)
        error = abs(refined - value)
        value = refined
        if error <= REFINE_TOL * abs(value):
            break
    else:
        logger.warning(f"{which.value} of {pb.label} still moving by {error:.3g} after {cells} cells")
    if not math.isfinite(value):
        return BReport(which, Divergent(End.INFINITY), problem=pb.label)
    logger.info(f"{which.value} of {pb.label} = {value:.10g}")
    return BReport(which, value, error_estimate=error, problem=pb.label)


def compute_B3(pb: HardyProblem, tol: float = DEFAULT_TOL) -> BReport:
    _require(pb, Which.B3)
    return _integral_constant(pb, Which.B3, tol)


def compute_B4(pb: HardyProblem, tol: float = DEFAULT_TOL) -> BReport:
    _require(pb, Which.B4)
    return _integral_constant(pb, Which.B4, tol)


def compute_B(pb: HardyProblem, tol: float = DEFAULT_TOL) -> BReport:
    which = infer_which(pb)
    return {
        Which.B1: compute_B1,
        Which.B2: compute_B2,
        Which.B3: compute_B3,
        Which.B4: compute_B4,
    }[which](pb, tol)


# --- Both sides of the inequality ----------------------------------------------------------


def _function_integrand(pb: HardyProblem, f: "RadialTestFunction") -> Integrand:
    def value(r):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(f.log_value(pb, r) + pb.space.log_density(r))

    return Integrand(
        eval=value,
        singularity_hint_zero=f.growth(pb, End.ZERO) + pb.space.density_growth(End.ZERO),
        decay_hint_infinity=f.growth(pb, End.INFINITY) + pb.space.density_growth(End.INFINITY),
    )


def _outside_piece(pb: HardyProblem, level: float, level_class: Optional[Growth], end: End,
                   radius: float, tol: float) -> float:
    """int beyond the grid end of level(r)^q Phi S.

    ``level_class`` is None when the level is constant beyond the grid.
    """
    if level == 0.0:
        return 0.0
    if not math.isfinite(level):
        return math.inf
    if level_class is None:
        phi_f = radial_integrand(pb.phi, pb.space)
        lo, hi = (0.0, radius) if end == End.ZERO else (radius, math.inf)
        mass = _mass(integrate(phi_f, lo, hi, tol, pb.breakpoints()))
        return level ** pb.q * mass
    growth = level_class * pb.q + pb.phi_class(end)
    if not converges_at(growth, end):
        return math.inf
    log_cut = pb.q * math.log(level) + float(pb.phi.log_eval(radius)) + float(pb.space.log_density(radius))
    profile = head_profile if end == End.ZERO else tail_profile
    return profile(math.exp(log_cut), radius, growth)


def _power_times(level: np.ndarray, t: float, log_weight: np.ndarray) -> np.ndarray:
    """level^t * exp(log_weight) without forming 0 * inf."""
    with np.errstate(over="ignore", under="ignore", divide="ignore", invalid="ignore"):
        out = np.exp(t * np.log(level) + log_weight)
    return np.where(level > 0.0, out, 0.0)


def _evaluate(pb: HardyProblem, f: "RadialTestFunction", tol: float) -> Tuple[float, float]:
    """(lhs, rhs_norm^p) on one shared grid."""
    lo_f, hi_f = f.support(pb)
    grid = problem_grid(pb, extra=f.breakpoints(pb), cover=hi_f)
    nodes = grid.nodes
    log_density = pb.space.log_density(nodes)
    values = f.sample(pb, grid)
    if not np.any(values > 0.0):
        return 0.0, 0.0
    log_phi_s = pb.phi.log_eval(nodes) + log_density
    with np.errstate(over="ignore", under="ignore", divide="ignore"):
        f_s = np.exp(np.log(values) + log_density)
    reaches_zero, reaches_inf = lo_f < grid.r_lo, hi_f > grid.r_hi
    mass = grid.integral(f_s)
    f_int = _function_integrand(pb, f)
    f_zero = f_int.singularity_hint_zero
    f_inf = f_int.decay_hint_infinity

    if pb.direction == Direction.INNER:
        head_mass = _mass(integrate(f_int, 0.0, grid.r_lo, tol)) if reaches_zero else 0.0
        if math.isinf(head_mass):
            return math.inf, _rhs_power(pb, f, grid, values, tol)
        level = grid.forward(f_s, head_mass)
        lhs_value = grid.integral(_power_times(level, pb.q, log_phi_s))
        lhs_value += _outside_piece(pb, head_mass, ball_integral(f_zero, End.ZERO) if reaches_zero else None,
                                    End.ZERO, grid.r_lo, tol)
        lhs_value += _outside_piece(pb, head_mass + mass,
                                    ball_integral(f_inf, End.INFINITY) if reaches_inf else None,
                                    End.INFINITY, grid.r_hi, tol)
    else:
        tail_mass = _mass(integrate(f_int, grid.r_hi, math.inf, tol)) if reaches_inf else 0.0
        if math.isinf(tail_mass):
            return math.inf, _rhs_power(pb, f, grid, values, tol)
        level = grid.backward(f_s, tail_mass)
        lhs_value = grid.integral(_power_times(level, pb.q, log_phi_s))
        lhs_value += _outside_piece(pb, tail_mass + mass,
                                    complement_integral(f_zero, End.ZERO) if reaches_zero else None,
                                    End.ZERO, grid.r_lo, tol)
        lhs_value += _outside_piece(pb, tail_mass,
                                    complement_integral(f_inf, End.INFINITY) if reaches_inf else None,
                                    End.INFINITY, grid.r_hi, tol)
    return lhs_value, _rhs_power(pb, f, grid, values, tol)


def _rhs_power(pb: HardyProblem, f: "RadialTestFunction", grid: NodeGrid, values: np.ndarray, tol: float) -> float:
    """int f^p Psi S."""
    log_weight = pb.psi.log_eval(grid.nodes) + pb.space.log_density(grid.nodes)
    total = grid.integral(_power_times(values, pb.p, log_weight))
    lo_f, hi_f = f.support(pb)
    for end, radius, reaches in ((End.ZERO, grid.r_lo, lo_f < grid.r_lo), (End.INFINITY, grid.r_hi, hi_f > grid.r_hi)):
        if not reaches:
            continue
        growth = f.growth(pb, end) * pb.p + pb.psi.growth(end) + pb.space.density_growth(end)
        if not converges_at(growth, end):
            return math.inf
        log_cut = (pb.p * float(f.log_value(pb, radius)) + float(pb.psi.log_eval(radius))
                   + float(pb.space.log_density(radius)))
        profile = head_profile if end == End.ZERO else tail_profile
        total += profile(math.exp(log_cut), radius, growth)
    return total


def lhs(pb: HardyProblem, f: "RadialTestFunction", tol: float = DEFAULT_TOL) -> float:
    """int (int_B f S)^q Phi S for inner problems, with the complement for outer ones."""
    return _evaluate(pb, f, tol)[0]


def rhs_norm(pb: HardyProblem, f: "RadialTestFunction", tol: float = DEFAULT_TOL) -> float:
    """(int f^p Psi S)^(1/p)."""
    return _evaluate(pb, f, tol)[1] ** (1.0 / pb.p)


def ratio(pb: HardyProblem, f: "RadialTestFunction", tol: float = DEFAULT_TOL) -> float:
    left, right = _evaluate(pb, f, tol)
    if right == 0.0:
        raise ZeroDenominator(f"Test function {f.label} has zero norm for {pb.label}")
    if math.isinf(left):
        return math.inf
    return left ** (1.0 / pb.q) / right ** (1.0 / pb.p)


# --- Sandwich ------------------------------------------------------------------------------


class Verdict(str, Enum):
    PASS = "pass"
    FAIL = "fail"
    DIVERGENCE_CONFIRMED = "divergence_confirmed"
    INCONCLUSIVE = "inconclusive"


@dataclass
class SandwichResult:
    verdict: Verdict
    report: BReport
    ratios: List[Tuple[str, float]] = field(default_factory=list)
    near_ratio: Optional[float] = None

    @property
    def max_ratio(self) -> float:
        return max((r for _, r in self.ratios), default=0.0)

    def to_record(self) -> Dict[str, Any]:
        record = self.report.to_record()
        record.update({
            "verdict": self.verdict.value,
            "max_ratio": _json_value(self.max_ratio),
            "near_ratio": _json_value(self.near_ratio),
            "ratios": {label: _json_value(r) for label, r in self.ratios},
        })
        return record


def sandwich_check(pb: HardyProblem, family: Sequence["RadialTestFunction"], report: Optional[BReport] = None,
                   upper_slack: float = 1e-6, lower_slack: float = 1e-4,
                   tol: float = DEFAULT_TOL) -> SandwichResult:
    """Checks B <= C <= (p')^(1/p') p^(1/q) B against a family of test functions.

    Finite p <= q problems PASS when every ratio stays under the upper bound and the
    near-extremizer at the argmax reaches B.  For q < p only boundedness of the ratios is
    judged.  A divergent constant is confirmed once some ratio exceeds DIVERGENCE_RATIO.
    """
    from .test_functions import NearExtremizer

    report = report or compute_B(pb, tol)
    ratios = []
    for f in family:
        try:
            ratios.append((f.label, ratio(pb, f, tol)))
        except ZeroDenominator:
            logger.debug(f"Skipping {f.label}: zero norm")

    result = SandwichResult(Verdict.INCONCLUSIVE, report, ratios)
    if not report.is_finite:
        if result.max_ratio > DIVERGENCE_RATIO:
            result.verdict = Verdict.DIVERGENCE_CONFIRMED
        return result

    if report.which in (Which.B1, Which.B2):
        near = ratio(pb, NearExtremizer(report.argmax_R), tol)
        result.near_ratio = near
        upper = float(report.sandwich_upper) * (1.0 + upper_slack)
        below_upper = all(r <= upper for _, r in ratios) and near <= upper
        reaches_b = near >= float(report.value) * (1.0 - lower_slack)
        result.verdict = Verdict.PASS if below_upper and reaches_b else Verdict.FAIL
        if result.verdict == Verdict.FAIL:
            logger.warning(f"Sandwich failed for {pb.label}: max ratio {result.max_ratio:.8g}, "
                           f"near {near:.8g}, B {float(report.value):.8g}, upper {upper:.8g}")
    else:
        result.verdict = Verdict.PASS if math.isfinite(result.max_ratio) else Verdict.FAIL
    return result


# --- Dual check of the q < p argument -----------------------------------------------------


def _scaled_by_level(values: np.ndarray, level: np.ndarray, p: float) -> np.ndarray:
    """values / level^p, zero where the level underflowed."""
    with np.errstate(over="ignore"):
        return np.divide(values, level ** p, out=np.zeros_like(values), where=level > 0.0)


@dataclass(frozen=True)
class DualBound:
    value: float
    bound: float

    @property
    def holds(self) -> bool:
        return self.value <= self.bound * (1.0 + 1e-8)


def dual_b1_bound(pb: HardyProblem, tol: float = DEFAULT_TOL) -> DualBound:
    """B1 (B2 for outer problems) of the p = q problem with Phi = Psi_d / H^p.

    H is the Psi_d S mass of the ball (or of the complement).  The constant never exceeds
    (p-1)^(-1/p), since int H' H^-p is explicit.
    """
    grid = problem_grid(pb)
    w = sample_weights(pb, grid, tol)
    p = pb.p
    dual = w.dual
    dual_total = grid.integral(dual)
    if pb.direction == Direction.INNER:
        if math.isinf(w.dual_head):
            raise AdmissibilityError(f"Psi_d S is not integrable at zero for {pb.label}")
        level = w.ball("dual")
        h_hi = w.dual_head + dual_total
        h_far = h_hi + w.dual_tail
        far = 0.0 if math.isinf(h_far) else h_far ** (1.0 - p)
        rest = (h_hi ** (1.0 - p) - far) / (p - 1.0)
        weight = grid.backward(_scaled_by_level(dual, level, p), rest)
    else:
        if math.isinf(w.dual_tail):
            raise AdmissibilityError(f"Psi_d S is not integrable at infinity for {pb.label}")
        level = w.complement("dual")
        g_lo = w.dual_tail + dual_total
        near = 0.0 if math.isinf(w.dual_head) else (g_lo + w.dual_head) ** (1.0 - p)
        rest = (g_lo ** (1.0 - p) - near) / (p - 1.0)
        weight = grid.forward(_scaled_by_level(dual, level, p), rest)
    with np.errstate(over="ignore", invalid="ignore"):
        profile = weight ** (1.0 / p) * level ** (1.0 / pb.p_conj)
    value = float(np.nanmax(profile))
    return DualBound(value=value, bound=(p - 1.0) ** (-1.0 / p))
