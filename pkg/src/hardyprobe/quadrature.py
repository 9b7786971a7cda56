# src/hardyprobe/quadrature.py
"""Adaptive quadrature for nonnegative radial integrands on (0, inf).

Integrals are taken in the log variable ``t = log r`` with scipy's QUADPACK.  Ends at zero and
infinity are reached by doubling the t-range.  When the integrand carries a growth hint the
convergence verdict comes from the hint and the remaining head or tail is added analytically.
Without a hint divergence is declared when two successive doublings fail to shrink the
increment.
"""

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
from numpy.polynomial import legendre
from scipy import integrate as sp_integrate
from scipy import optimize

from .asymptotics import End, Growth, converges_at
from .errors import (
    DivergentIntegralError,
    EvaluationFailure,
    NoConvergence,
    NonPositiveIntegrand,
    ParameterError,
)

logger = logging.getLogger(__name__)

DEFAULT_TOL = 1e-9
QUAD_LIMIT = 200
T_START = 8.0
T_MAX = 690.0
# increments that keep at least this fraction of the previous one count as non-shrinking
CAUCHY_RATIO = 0.9


@dataclass(frozen=True)
class Divergent:
    """Marker value for an integral or supremum that is infinite at ``end``."""
    end: End

    def __str__(self) -> str:
        return f"divergent({self.end.value})"


Value = Union[float, Divergent]


@dataclass(frozen=True)
class Integrand:
    """A nonnegative vectorized function of r with optional growth classes at the two ends."""
    eval: Callable[[np.ndarray], np.ndarray]
    singularity_hint_zero: Optional[Growth] = None
    decay_hint_infinity: Optional[Growth] = None

    def __call__(self, r):
        return self.eval(r)


@dataclass(frozen=True)
class QuadResult:
    value: Value
    abs_error_estimate: float
    evaluations: int

    @property
    def is_finite(self) -> bool:
        return not isinstance(self.value, Divergent)


@dataclass(frozen=True)
class SupResult:
    sup: Value
    argmax: Optional[float]
    evaluations: int

    @property
    def is_finite(self) -> bool:
        return not isinstance(self.sup, Divergent)


class _Counter:
    def __init__(self):
        self.n = 0


def as_integrand(f) -> Integrand:
    if isinstance(f, Integrand):
        return f
    if callable(f):
        return Integrand(eval=f)
    raise TypeError(f"Cannot integrate object of type {type(f).__name__}")


def _point_eval(f: Integrand, counter: _Counter) -> Callable[[float], float]:
    def value_at(r: float) -> float:
        counter.n += 1
        try:
            v = float(f.eval(r))
        except (ArithmeticError, ValueError, TypeError) as e:
            raise EvaluationFailure(f"Integrand failed at r={r!r}: {e}") from e
        if math.isnan(v):
            raise EvaluationFailure(f"Integrand returned NaN at r={r!r}")
        if v < 0.0:
            raise NonPositiveIntegrand(r, v)
        return v
    return value_at


def _quad_log(value_at, t_lo: float, t_hi: float, tol: float, epsabs: float = 0.0) -> Tuple[float, float]:
    """int over [e^t_lo, e^t_hi] of f(r) dr, computed as int f(e^t) e^t dt."""
    if t_hi <= t_lo:
        return 0.0, 0.0

    def h(t: float) -> float:
        r = math.exp(t)
        v = value_at(r)
        return v * r if v else 0.0

    with np.errstate(over="ignore", invalid="ignore"):
        out = sp_integrate.quad(h, t_lo, t_hi, epsabs=epsabs, epsrel=tol, limit=QUAD_LIMIT, full_output=1)
    value, err = out[0], out[1]
    if not math.isfinite(value):
        return math.inf, math.inf
    if len(out) > 3 and err > 10.0 * max(tol * abs(value), epsabs):
        raise NoConvergence(
            f"quad did not reach tolerance on [{math.exp(t_lo):.3g}, {math.exp(t_hi):.3g}]: {out[3]}",
            value=value,
            error=err,
        )
    return value, err


def head_profile(value_at_cut: float, r_cut: float, hint: Growth) -> float:
    """Analytic int_0^r_cut of the hinted class fitted through the value at r_cut."""
    if value_at_cut == 0.0:
        return 0.0
    if r_cut >= 0.1:
        return math.inf
    u_cut = math.log(1.0 / r_cut)
    s, b, c = hint.power, hint.log, hint.loglog
    c1 = s + 1.0
    # with u = log(1/r) the head is f(r_cut) r_cut int_U^inf e^{-c1 (u-U)} (u/U)^b (log u/log U)^c du
    if c == 0.0 and abs(c1) <= 1e-12:
        return value_at_cut * r_cut * u_cut / (-b - 1.0)
    if c == 0.0 and b == 0.0 and c1 > 0:
        return value_at_cut * r_cut / c1

    def ratio(u: float) -> float:
        x = math.exp(-c1 * (u - u_cut)) * (u / u_cut) ** b
        if c:
            x *= (math.log(u) / math.log(u_cut)) ** c
        return x

    integral, _ = sp_integrate.quad(ratio, u_cut, math.inf, limit=QUAD_LIMIT)
    return value_at_cut * r_cut * integral


def tail_profile(value_at_cut: float, r_cut: float, hint: Growth) -> float:
    """Analytic int_r_cut^inf of the hinted class fitted through the value at r_cut."""
    if value_at_cut == 0.0:
        return 0.0
    a, rate, b = hint.power, hint.rate, hint.log
    if rate == 0.0 and b == 0.0:
        return value_at_cut * r_cut / (-a - 1.0)
    log_cut = math.log(r_cut) if r_cut > 1.0 else None

    def shape(x: float) -> float:
        # profile at r = x * r_cut relative to the cut, without the exponential
        v = x ** a
        if b and log_cut:
            v *= (1.0 + math.log(x) / log_cut) ** b
        return v

    if rate < 0.0:
        k = -rate * r_cut
        integral, _ = sp_integrate.quad(lambda v: math.exp(-v) * shape(1.0 + v / k), 0.0, math.inf, limit=QUAD_LIMIT)
        return value_at_cut * r_cut * integral / k
    integral, _ = sp_integrate.quad(shape, 1.0, math.inf, limit=QUAD_LIMIT)
    return value_at_cut * r_cut * integral


def _converged(increment: float, total: float, tol: float) -> bool:
    return increment <= 0.1 * tol * abs(total) or increment == 0.0


def _open_end(value_at, m: float, hint: Optional[Growth], tol: float, end: End) -> Union[Tuple[float, float], Divergent]:
    """int_0^m f dr for End.ZERO, int_m^inf f dr for End.INFINITY."""
    if hint is not None and not converges_at(hint, end):
        return Divergent(end)
    t_m = math.log(m)
    sign = -1.0 if end == End.ZERO else 1.0
    span_max = T_MAX + sign * -t_m

    def piece_between(inner: float, outer: float) -> Tuple[float, float]:
        lo, hi = sorted((t_m + sign * inner, t_m + sign * outer))
        return _quad_log(value_at, lo, hi, tol, epsabs=0.01 * tol * abs(total))

    total = 0.0
    span = min(T_START, span_max)
    total, err = piece_between(0.0, span)
    if not math.isfinite(total):
        return Divergent(end)

    increments: List[float] = []
    while True:
        if hint is not None:
            r_cut = math.exp(t_m + sign * span)
            value_at_cut = value_at(r_cut)
            if end == End.ZERO:
                rest = head_profile(value_at_cut, r_cut, hint)
            else:
                rest = tail_profile(value_at_cut, r_cut, hint)
            if _converged(rest, total, tol):
                return total + rest, err + 0.01 * rest
        if span >= span_max:
            if hint is not None and math.isfinite(rest):
                return total + rest, err + rest
            raise NoConvergence(f"Integral toward {end.value} did not settle by r={math.exp(t_m + sign * span):.3g}",
                                value=total)
        new_span = min(2.0 * span, span_max)
        piece, piece_err = piece_between(span, new_span)
        if not math.isfinite(piece):
            return Divergent(end)
        total, err, span = total + piece, err + piece_err, new_span
        if hint is None:
            increments.append(piece)
            if _converged(piece, total, tol):
                return total, err + piece
            if _non_shrinking(increments):
                return Divergent(end)


def _non_shrinking(increments: Sequence[float]) -> bool:
    if len(increments) < 3:
        return False
    a, b, c = increments[-3:]
    return b >= CAUCHY_RATIO * a and c >= CAUCHY_RATIO * b


def integrate(f, a: float = 0.0, b: float = math.inf, tol: float = DEFAULT_TOL,
              breakpoints: Sequence[float] = ()) -> QuadResult:
    """Integrates a nonnegative function of r over [a, b] with 0 <= a < b <= inf.

    Returns a QuadResult whose value is either a float or ``Divergent(end)``.  ``tol`` is the
    relative error target.  Interior ``breakpoints`` split the range at known kinks.
    """
    if not (0.0 <= a < b):
        raise ParameterError(f"Integration range must satisfy 0 <= a < b, got [{a}, {b}]")
    if tol <= 0.0:
        raise ParameterError(f"Tolerance must be positive, got {tol}")
    f = as_integrand(f)
    counter = _Counter()
    value_at = _point_eval(f, counter)

    cuts = sorted({float(x) for x in breakpoints if a < x < b})
    if a == 0.0 and b == math.inf and not cuts:
        cuts = [1.0]
    edges = [a] + cuts + [b]

    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == 0.0 and hi == math.inf:
            raise ParameterError("Internal split failed")
        if lo == 0.0:
            piece = _open_end(value_at, hi, f.singularity_hint_zero, tol, End.ZERO)
        elif hi == math.inf:
            piece = _open_end(value_at, lo, f.decay_hint_infinity, tol, End.INFINITY)
        else:
            piece = _quad_log(value_at, math.log(lo), math.log(hi), tol)
            if not math.isfinite(piece[0]):
                raise EvaluationFailure(f"Integrand is not finite on [{lo}, {hi}]")
        if isinstance(piece, Divergent):
            logger.debug(f"Integral over [{a}, {b}] diverges at {piece.end.value}")
            return QuadResult(piece, 0.0, counter.n)
        total += piece[0]
        err += piece[1]

    return QuadResult(total, err, counter.n)


def cumulative(f, grid: Sequence[float], tol: float = DEFAULT_TOL) -> np.ndarray:
    """F(r_i) = int_0^r_i f for a strictly increasing positive grid."""
    radii = np.asarray(grid, dtype=float)
    if radii.ndim != 1 or radii.size == 0:
        raise ParameterError("Grid must be a non-empty one-dimensional sequence")
    if radii[0] <= 0.0 or np.any(np.diff(radii) <= 0.0):
        raise ParameterError("Grid must be strictly increasing and positive")
    f = as_integrand(f)

    head = integrate(f, 0.0, float(radii[0]), tol)
    if not head.is_finite:
        raise DivergentIntegralError(End.ZERO.value)
    out = np.empty_like(radii)
    running = float(head.value)
    out[0] = running
    for i in range(1, radii.size):
        running += float(integrate(f, float(radii[i - 1]), float(radii[i]), tol).value)
        out[i] = running
    return out


def sup_search(g: Callable[[float], Value], r_min: float, r_max: float, refine_tol: float = 1e-6,
               n_scan: int = 64, blowup: float = 1e6, trend: int = 8, steady_growth: bool = True) -> SupResult:
    """Supremum of a nonnegative function of R over [r_min, r_max].

    A log-spaced scan brackets the maximum, which is then refined with scipy's bounded
    golden-section/Brent search in log R.  A scan that rises monotonically into an end and
    exceeds ``blowup`` times its median is reported as divergent at that end.  So is one that at
    least doubles over ``trend`` samples and keeps that log-growth rate into the end, unless
    ``steady_growth`` is off.
    """
    if not (0.0 < r_min < r_max < math.inf):
        raise ParameterError(f"Search range must satisfy 0 < r_min < r_max < inf, got [{r_min}, {r_max}]")
    n_scan = max(int(n_scan), 64)
    evaluations = 0

    def value(radius: float) -> float:
        nonlocal evaluations
        evaluations += 1
        v = g(radius)
        if isinstance(v, Divergent):
            return math.inf
        v = float(v)
        if math.isnan(v):
            raise EvaluationFailure(f"Objective returned NaN at R={radius!r}")
        return v

    radii = np.geomspace(r_min, r_max, n_scan)
    values = np.array([value(float(radius)) for radius in radii])

    if np.isinf(values).any():
        i = int(np.argmax(np.isinf(values)))
        end = End.ZERO if i < n_scan // 2 else End.INFINITY
        return SupResult(Divergent(end), float(radii[i]), evaluations)

    median = float(np.median(values))
    if _rises_into(values, trend, blowup * median, steady_growth):
        return SupResult(Divergent(End.INFINITY), None, evaluations)
    if _rises_into(values[::-1], trend, blowup * median, steady_growth):
        return SupResult(Divergent(End.ZERO), None, evaluations)

    i = int(np.argmax(values))
    best, best_r = float(values[i]), float(radii[i])
    lo = math.log(radii[max(i - 1, 0)])
    hi = math.log(radii[min(i + 1, n_scan - 1)])
    xatol = max(refine_tol / max(best_r, 1.0), 1e-12)
    res = optimize.minimize_scalar(
        lambda t: -value(math.exp(t)),
        bounds=(lo, hi),
        method="bounded",
        options={"xatol": xatol},
    )
    if -res.fun > best:
        best, best_r = float(-res.fun), float(math.exp(res.x))
    return SupResult(best, best_r, evaluations)


def _rises_into(values: np.ndarray, trend: int, ceiling: float, steady_growth: bool) -> bool:
    """Whether ``values`` climb strictly into their last entry without levelling off."""
    tail = values[-2 * trend:]
    if tail.size < 2 * trend or not np.all(np.diff(values[-trend:]) > 0):
        return False
    if values[-1] >= ceiling:
        return True
    if not steady_growth or np.any(tail <= 0.0):
        return False
    steps = np.diff(np.log(tail))
    earlier, later = float(steps[: trend - 1].sum()), float(steps[trend:].sum())
    return earlier >= math.log(2.0) and later >= CAUCHY_RATIO * earlier


# --- Composite Gauss-Legendre grids -------------------------------------------------------


@lru_cache(maxsize=16)
def _reference_rule(order: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Nodes, weights and partial-integration matrix of the order-point rule on [-1, 1].

    ``partial[j, k]`` is the integral from -1 to node j of the k-th Lagrange basis polynomial.
    """
    x, w = legendre.leggauss(order)
    vander = legendre.legvander(x, order - 1)
    basis = np.linalg.inv(vander)
    antider = legendre.legint(basis, lbnd=-1.0, axis=0)
    partial = legendre.legval(x, antider).T
    return x, w, partial


@dataclass(frozen=True)
class NodeGrid:
    """Log-spaced cells of [r_lo, r_hi] with Gauss-Legendre nodes in the log variable."""
    edges: np.ndarray
    nodes: np.ndarray
    weights: np.ndarray
    partial: np.ndarray

    @property
    def r_lo(self) -> float:
        return float(self.edges[0])

    @property
    def r_hi(self) -> float:
        return float(self.edges[-1])

    def cell_integrals(self, values: np.ndarray) -> np.ndarray:
        return np.sum(values * self.weights, axis=1)

    def integral(self, values: np.ndarray) -> float:
        return float(np.sum(self.cell_integrals(values)))

    def forward(self, values: np.ndarray, head: float = 0.0) -> np.ndarray:
        """head + int_r_lo^node of the sampled function, at every node."""
        weighted = values * self.weights
        cells = weighted.sum(axis=1)
        before = head + np.concatenate(([0.0], np.cumsum(cells)[:-1]))
        return before[:, None] + weighted @ self.partial.T

    def backward(self, values: np.ndarray, tail: float = 0.0) -> np.ndarray:
        """int_node^r_hi of the sampled function plus tail, at every node."""
        weighted = values * self.weights
        cells = weighted.sum(axis=1)
        after = tail + np.concatenate((np.cumsum(cells[::-1])[::-1][1:], [0.0]))
        inside = cells[:, None] - weighted @ self.partial.T
        return after[:, None] + np.maximum(inside, 0.0)


def log_node_grid(r_lo: float, r_hi: float, cells: int = 4096, order: int = 8,
                  breakpoints: Sequence[float] = ()) -> NodeGrid:
    """Builds a NodeGrid; breakpoints inside (r_lo, r_hi) become cell edges."""
    if not (0.0 < r_lo < r_hi < math.inf):
        raise ParameterError(f"Node grid range must satisfy 0 < r_lo < r_hi < inf, got [{r_lo}, {r_hi}]")
    edges = np.geomspace(r_lo, r_hi, cells + 1)
    extra = [b for b in breakpoints if r_lo < b < r_hi]
    if extra:
        edges = np.unique(np.concatenate((edges, extra)))
        keep = np.concatenate(([True], np.diff(np.log(edges)) > 1e-12))
        edges = edges[keep]
    x, w, partial = _reference_rule(order)
    t_edges = np.log(edges)
    width = np.diff(t_edges)
    t_nodes = t_edges[:-1, None] + 0.5 * width[:, None] * (x[None, :] + 1.0)
    nodes = np.exp(t_nodes)
    weights = 0.5 * width[:, None] * w[None, :] * nodes
    # partial integrals are taken against the weighted values, so rescale by 1/w
    return NodeGrid(edges=edges, nodes=nodes, weights=weights, partial=partial / w[None, :])
