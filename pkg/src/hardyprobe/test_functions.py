# src/hardyprobe/test_functions.py
"""Radial test functions for the Hardy inequalities and the seeded problem generator.

Every test function knows its support, the kinks a grid should resolve and its growth class
where the support touches zero or infinity.  Values may depend on the problem (extremizers
are built from the problem's weights).
"""

import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .asymptotics import CONSTANT, End, Growth
from .errors import ParameterError
from .hardy_core import BReport, Direction, HardyProblem, problem_grid, sample_weights
from .polar_space import PolarSpace
from .quadrature import NodeGrid
from .weights import WeightExpr

logger = logging.getLogger(__name__)


def _log_indicator(r, lo: float, hi: float, log_values):
    r = np.asarray(r, dtype=float)
    inside = (r > lo) & (r < hi)
    out = np.where(inside, log_values, -np.inf)
    return float(out) if out.ndim == 0 else out


class RadialTestFunction(ABC):
    """A nonnegative radial function f(r) used on both sides of a Hardy inequality."""

    label: str = "f"

    @abstractmethod
    def log_value(self, pb: HardyProblem, r):
        """log f(r); -inf outside the support."""
        pass

    def support(self, pb: HardyProblem) -> Tuple[float, float]:
        return 0.0, math.inf

    def breakpoints(self, pb: HardyProblem) -> Tuple[float, ...]:
        return tuple(x for x in self.support(pb) if 0.0 < x < math.inf)

    def growth(self, pb: HardyProblem, end: End) -> Growth:
        """Class of f where the support reaches ``end``."""
        return CONSTANT

    def sample(self, pb: HardyProblem, grid: NodeGrid) -> np.ndarray:
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(self.log_value(pb, grid.nodes))


@dataclass(frozen=True)
class NearExtremizer(RadialTestFunction):
    """Psi_d on the ball of radius R (inner problems) or on its complement (outer problems).

    Its ratio is at least B(R).
    """
    radius: float

    def __post_init__(self):
        if not self.radius > 0:
            raise ParameterError(f"Extremizer radius must be positive, got {self.radius}")

    @property
    def label(self) -> str:
        return f"near_extremizer(R={self.radius:.6g})"

    def support(self, pb):
        if pb.direction == Direction.INNER:
            return 0.0, self.radius
        return self.radius, math.inf

    def log_value(self, pb, r):
        lo, hi = self.support(pb)
        return _log_indicator(r, lo, hi, pb.psi_dual.log_eval(r))

    def growth(self, pb, end):
        return pb.psi_dual.growth(end)


@dataclass(frozen=True)
class PowerBump(RadialTestFunction):
    """r^exponent on (0, radius)."""
    exponent: float
    radius: float = 1.0

    @classmethod
    def near_critical(cls, pb: HardyProblem, epsilon: float, radius: float = 1.0) -> "PowerBump":
        """Exponent epsilon above the value where int f^p Psi S diverges at zero."""
        psi_power = pb.psi.growth(End.ZERO).power
        return cls((-pb.space.local_dim - psi_power) / pb.p + epsilon, radius)

    @property
    def label(self) -> str:
        return f"power_bump(a={self.exponent:.6g},R={self.radius:.6g})"

    def support(self, pb):
        return 0.0, self.radius

    def log_value(self, pb, r):
        r = np.asarray(r, dtype=float)
        with np.errstate(divide="ignore"):
            return _log_indicator(r, 0.0, self.radius, self.exponent * np.log(r))

    def growth(self, pb, end):
        return Growth(power=self.exponent)


@dataclass(frozen=True)
class PiecewiseRandom(RadialTestFunction):
    """Step function with uniform random levels between log-spaced knots in [lo, hi]."""
    seed: int
    knots: int = 8
    lo: float = 1e-2
    hi: float = 1e2

    def __post_init__(self):
        if self.knots < 2:
            raise ParameterError(f"A random step function needs at least 2 knots, got {self.knots}")
        if not 0 < self.lo < self.hi < math.inf:
            raise ParameterError(f"Random support must satisfy 0 < lo < hi < inf, got [{self.lo}, {self.hi}]")

    @property
    def label(self) -> str:
        return f"piecewise_random(seed={self.seed})"

    def _knots(self) -> np.ndarray:
        return np.geomspace(self.lo, self.hi, self.knots)

    def _levels(self) -> np.ndarray:
        rng = np.random.default_rng(self.seed)
        return rng.uniform(0.05, 1.0, self.knots - 1)

    def support(self, pb):
        return self.lo, self.hi

    def breakpoints(self, pb):
        return tuple(float(x) for x in self._knots())

    def log_value(self, pb, r):
        r = np.asarray(r, dtype=float)
        knots, levels = self._knots(), np.log(self._levels())
        idx = np.clip(np.searchsorted(knots, r, side="right") - 1, 0, levels.size - 1)
        return _log_indicator(r, self.lo, self.hi, levels[idx])


@dataclass(frozen=True)
class Scaled(RadialTestFunction):
    base: RadialTestFunction
    factor: float

    def __post_init__(self):
        if not self.factor > 0:
            raise ParameterError(f"Scale factor must be positive, got {self.factor}")

    @property
    def label(self) -> str:
        return f"{self.factor:g}*{self.base.label}"

    def support(self, pb):
        return self.base.support(pb)

    def breakpoints(self, pb):
        return self.base.breakpoints(pb)

    def growth(self, pb, end):
        return self.base.growth(pb, end)

    def log_value(self, pb, r):
        return self.base.log_value(pb, r) + math.log(self.factor)

    def sample(self, pb, grid):
        return self.factor * self.base.sample(pb, grid)


@dataclass(frozen=True)
class ZeroFunction(RadialTestFunction):
    label: str = "zero"

    def support(self, pb):
        return 1.0, 2.0

    def log_value(self, pb, r):
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, -np.inf)
        return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class FkExtremizer(RadialTestFunction):
    """The k-th member of the extremizing sequence on the annulus (2^-k, 2^k).

    For q < p it is (Phi mass)^(g/pq) (truncated Psi_d mass)^(g/pq') Psi_d, the masses taken
    the way B3/B4 take them; where the Phi mass is infinite it falls back to Psi_d.  For
    p <= q it is Psi_d cut at the dyadic radius maximizing the truncated B(R).
    """
    k: int

    def __post_init__(self):
        if self.k < 1:
            raise ParameterError(f"Extremizer index must be >= 1, got {self.k}")

    @property
    def label(self) -> str:
        return f"fk(k={self.k})"

    def annulus(self, pb: HardyProblem) -> Tuple[float, float]:
        """(2^-k, 2^k), cut at the top of the problem's radial range."""
        return 2.0 ** -self.k, min(2.0 ** self.k, pb.radial_range()[1])

    def support(self, pb):
        return self.annulus(pb)

    def breakpoints(self, pb):
        lo, hi = self.annulus(pb)
        return tuple(2.0 ** j for j in range(-self.k, self.k + 1) if 2.0 ** j < hi) + (hi,)

    def log_value(self, pb, r):
        grid = problem_grid(pb, extra=self.breakpoints(pb))
        values = self.sample(pb, grid).ravel()
        nodes = grid.nodes.ravel()
        with np.errstate(divide="ignore"):
            log_values = np.log(values)
        r = np.asarray(r, dtype=float)
        lo, hi = self.annulus(pb)
        out = np.interp(np.log(np.clip(r, lo, hi)), np.log(nodes), np.where(np.isfinite(log_values), log_values, -745.0))
        return _log_indicator(r, lo, hi, out)

    def sample(self, pb, grid):
        lo, hi = self.annulus(pb)
        nodes = grid.nodes
        annulus = (nodes > lo) & (nodes < hi)
        w = sample_weights(pb, grid)
        dual = w.dual * annulus
        if pb.q < pb.p:
            if pb.direction == Direction.INNER:
                outer, inner = w.complement("phi"), grid.forward(dual)
            else:
                outer, inner = w.ball("phi"), grid.backward(dual)
            if not np.all(np.isfinite(outer[annulus])):
                return dual
            a = pb.gamma / (pb.p * pb.q)
            b = pb.gamma / (pb.p * pb.q_conj)
            with np.errstate(under="ignore"):
                return outer ** a * inner ** b * dual
        radius = self._dyadic_radius(pb, grid, w.phi, dual, w.phi_head, w.phi_tail)
        if pb.direction == Direction.INNER:
            return dual * (nodes < radius)
        return dual * (nodes > radius)

    def _dyadic_radius(self, pb, grid, phi, dual, phi_head, phi_tail) -> float:
        phi_cells = grid.cell_integrals(phi)
        dual_cells = grid.cell_integrals(dual)
        if pb.direction == Direction.INNER:
            weight_part = phi_tail + np.concatenate((np.cumsum(phi_cells[::-1])[::-1], [0.0]))
            dual_part = np.concatenate(([0.0], np.cumsum(dual_cells)))
        else:
            weight_part = phi_head + np.concatenate(([0.0], np.cumsum(phi_cells)))
            dual_part = np.concatenate((np.cumsum(dual_cells[::-1])[::-1], [0.0]))
        radii = np.array(self.breakpoints(pb))
        log_edges = np.log(grid.edges)
        idx = np.abs(log_edges[None, :] - np.log(radii)[:, None]).argmin(axis=1)
        with np.errstate(invalid="ignore", over="ignore"):
            score = weight_part[idx] ** (1.0 / pb.q) * dual_part[idx] ** (1.0 / pb.p_conj)
        if not np.any(np.isfinite(score)):
            return 1.0
        best = int(np.nanargmax(np.where(np.isfinite(score), score, -1.0)))
        return float(grid.edges[idx[best]])


# --- Families -----------------------------------------------------------------------------


def standard_family(pb: HardyProblem, report: Optional[BReport] = None, seed: int = 0,
                    random_count: int = 4, epsilon: float = 0.05) -> List[RadialTestFunction]:
    """Near-extremizers around the argmax, a near-critical power bump and random steps."""
    r_lo, r_hi = pb.radial_range()
    center = report.argmax_R if report is not None and report.argmax_R else 1.0
    family: List[RadialTestFunction] = [
        NearExtremizer(radius) for radius in (0.1 * center, center, 10.0 * center) if r_lo < radius < r_hi
    ]
    family.append(PowerBump.near_critical(pb, epsilon, radius=min(1.0, 0.5 * r_hi)))
    states = np.random.SeedSequence(seed).generate_state(random_count)
    family.extend(PiecewiseRandom(int(s)) for s in states)
    return family


def fk_family(k_max: int = 20, k_min: int = 1, step: int = 1) -> List[RadialTestFunction]:
    return [FkExtremizer(k) for k in range(k_min, k_max + 1, step)]


# --- Seeded admissible problems -----------------------------------------------------------


def suite_spaces() -> Tuple[PolarSpace, ...]:
    return (
        PolarSpace.euclidean(1),
        PolarSpace.euclidean(3),
        PolarSpace.hyperbolic(3),
        PolarSpace.local_global(2, 1.0),
    )


def random_admissible_problem(rng: np.random.Generator, space: PolarSpace, name: str = "") -> HardyProblem:
    """A p <= q problem with finite B, weights r^a e^(k r).

    Pure power pairs are balanced so B(R) is constant; otherwise the weight carrying the
    large-radius factor is damped faster than the space grows.
    """
    p = float(rng.uniform(1.3, 3.5))
    q = p + float(rng.uniform(0.0, 2.0))
    p_conj = p / (p - 1.0)
    d = space.local_dim
    g = space.global_rate
    direction = Direction.INNER if rng.random() < 0.5 else Direction.OUTER
    balanced = g == 0.0 and rng.random() < 0.5

    if direction == Direction.INNER:
        b = -d + float(rng.uniform(0.2, 2.0))
        if balanced:
            phi = WeightExpr(power=-d - q * (b + d) / p_conj)
        else:
            rate = g + q * g / p_conj + float(rng.uniform(0.5, 2.0))
            phi = WeightExpr(power=-d + float(rng.uniform(0.2, 2.0)), exprate=-rate)
        dual = WeightExpr(power=b)
    else:
        a = -d + float(rng.uniform(0.2, 2.0))
        phi = WeightExpr(power=a)
        if balanced:
            dual = WeightExpr(power=-d - p_conj * (a + d) / q)
        else:
            rate = g + p_conj * g / q + float(rng.uniform(0.5, 2.0))
            dual = WeightExpr(power=-d + float(rng.uniform(0.2, 2.0)), exprate=-rate)
    return HardyProblem.with_dual(space, p, q, direction, phi, dual, name=name)


def seeded_problems(seed: int, count: int, spaces: Optional[Sequence[PolarSpace]] = None) -> List[HardyProblem]:
    """``count`` admissible problems; problem i depends only on (seed, i)."""
    spaces = tuple(spaces) if spaces else suite_spaces()
    problems = []
    for i in range(count):
        rng = np.random.default_rng(np.random.SeedSequence([seed, i]))
        problems.append(random_admissible_problem(rng, spaces[i % len(spaces)], name=f"suite-{seed}-{i}"))
    return problems
