# src/hardyprobe/inequalities/grid.py
"""Uniform cell-centred grids on [-L, L]^d, kernel cell averages and gridded inputs.

A function f = g * G is synthesized by a discrete convolution of the sampled g with the cell
averages of the kernel majorant.  The cell holding the origin carries the singularity; its
average is a radial quadrature, the others use a tensor Gauss-Legendre rule.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Callable, List, Optional, Protocol, Sequence, Tuple

import numpy as np
from scipy.signal import fftconvolve

from ..asymptotics import End, Growth
from ..errors import GridError, ParameterError
from ..kernels import KernelBound, KernelVariant, eval_kernel_bound
from ..quadrature import Integrand, integrate
from ..weights import WeightExpr

logger = logging.getLogger(__name__)

DEFAULT_HALF_WIDTH = 8.0
DEFAULT_POINTS = {1: 1024, 2: 256}
# cell size must stay below this share of every singularity scale
RESOLUTION_SHARE = 0.1
CELL_ORDER = {1: 4, 2: 2}
WEIGHT_ORDER = {1: 8, 2: 4}
CENTER_ANGLES = 16


@dataclass(frozen=True)
class UniformGrid:
    """Cell centres -L + (i + 1/2) h, i = 0..N-1, on every axis; N even keeps 0 off the nodes."""
    dim: int = 1
    half_width: float = DEFAULT_HALF_WIDTH
    points: Optional[int] = None

    def __post_init__(self):
        if self.dim not in DEFAULT_POINTS:
            raise ParameterError(f"Grids exist for d in {sorted(DEFAULT_POINTS)}, got d={self.dim}")
        if self.points is None:
            object.__setattr__(self, "points", DEFAULT_POINTS[self.dim])
        if self.points < 2 or self.points % 2:
            raise ParameterError(f"Grid needs an even number of points, got {self.points}")
        if not self.half_width > 0:
            raise ParameterError(f"Grid half width must be positive, got {self.half_width}")

    @property
    def h(self) -> float:
        return 2.0 * self.half_width / self.points

    @property
    def cell_volume(self) -> float:
        return self.h ** self.dim

    @property
    def axis(self) -> np.ndarray:
        return -self.half_width + (np.arange(self.points) + 0.5) * self.h

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.points,) * self.dim

    def coords(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.axis] * self.dim), indexing="ij")

    def radii(self) -> np.ndarray:
        """|x| at every node."""
        return np.sqrt(sum(c * c for c in self.coords()))

    def refined(self, factor: int = 2) -> "UniformGrid":
        return replace(self, points=self.points * factor)

    def zoomed(self, factor: float) -> "UniformGrid":
        return replace(self, half_width=self.half_width / factor)

    def describe(self) -> dict:
        return {"dim": self.dim, "half_width": self.half_width, "points": self.points, "h": self.h}


# --- gridded inputs ---------------------------------------------------------------------


def _bump_profile(s: np.ndarray) -> np.ndarray:
    """exp(1 - 1/(1 - s^2)) on s < 1, zero outside; equals 1 at s = 0."""
    out = np.zeros_like(s)
    inside = s < 1.0
    out[inside] = np.exp(1.0 - 1.0 / (1.0 - s[inside] ** 2))
    return out


@dataclass(frozen=True)
class Bump:
    """Smooth bump of the given height supported in the ball of radius ``width``."""
    center: Tuple[float, ...] = (0.0,)
    width: float = 1.0
    height: float = 1.0

    def __post_init__(self):
        if not self.width > 0:
            raise ParameterError(f"Bump width must be positive, got {self.width}")
        if self.height < 0:
            raise ParameterError(f"Bump height must be nonnegative, got {self.height}")

    @property
    def scale(self) -> float:
        return self.width

    def _center(self, dim: int) -> Tuple[float, ...]:
        if len(self.center) == dim:
            return tuple(self.center)
        if len(self.center) == 1:
            return tuple(self.center) * dim
        raise ParameterError(f"Bump centre {self.center} does not match dimension {dim}")

    def sample(self, grid: UniformGrid) -> np.ndarray:
        if self.height == 0.0:
            return np.zeros(grid.shape)
        center = self._center(grid.dim)
        coords = grid.coords()
        dist = np.sqrt(sum((c - x0) ** 2 for c, x0 in zip(coords, center)))
        return self.height * _bump_profile(dist / self.width)

    def dilated(self, factor: float) -> "Bump":
        """The bump pushed towards the origin: centre and width divided by ``factor``."""
        return Bump(tuple(c / factor for c in self.center), self.width / factor, self.height)


@dataclass(frozen=True)
class BumpSum:
    bumps: Tuple[Bump, ...] = field(default_factory=tuple)
    label: str = "bumps"

    @property
    def scale(self) -> float:
        return min((b.width for b in self.bumps), default=math.inf)

    def sample(self, grid: UniformGrid) -> np.ndarray:
        out = np.zeros(grid.shape)
        for bump in self.bumps:
            out = out + bump.sample(grid)
        return out

    def dilated(self, factor: float) -> "BumpSum":
        return BumpSum(tuple(b.dilated(factor) for b in self.bumps), self.label)


class GridInput(Protocol):
    scale: float

    def sample(self, grid: UniformGrid) -> np.ndarray: ...

    def dilated(self, factor: float) -> "GridInput": ...


def zero_input() -> BumpSum:
    return BumpSum((), label="zero")


def unit_bump(dim: int = 1, center: Optional[Sequence[float]] = None, width: float = 1.0) -> Bump:
    return Bump(tuple(center) if center is not None else (0.0,) * dim, width)


def random_bumps(rng: np.random.Generator, dim: int = 1, count: int = 3,
                 half_width: float = DEFAULT_HALF_WIDTH) -> BumpSum:
    """Bumps with centres in the inner half of the box, widths in [0.5, 2], heights in [0.2, 1]."""
    bumps = []
    for _ in range(count):
        center = tuple(float(c) for c in rng.uniform(-half_width / 2.0, half_width / 2.0, size=dim))
        bumps.append(Bump(center, float(rng.uniform(0.5, 2.0)), float(rng.uniform(0.2, 1.0))))
    return BumpSum(tuple(bumps), label=f"random{count}")


def concentrate_width(grid: UniformGrid) -> float:
    """Starting bump width of a concentrating sequence: L/16, or the narrowest the grid resolves."""
    return max(grid.half_width / 16.0, 1.25 * grid.h / RESOLUTION_SHARE)


def concentrating_bumps(dim: int = 1, levels: int = 4, zoom: float = 16.0, width: float = 0.5) -> List[Bump]:
    """Bumps at the origin with widths width / zoom^k."""
    return [unit_bump(dim, width=width / zoom ** k) for k in range(levels)]


# --- kernels on the grid ----------------------------------------------------------------


def singularity_scale(kernel: KernelBound) -> float:
    """Length on which the kernel majorant changes form."""
    if kernel.variant == KernelVariant.EUCLIDEAN_BESSEL:
        return 1.0 / math.sqrt(kernel.c)
    if kernel.variant == KernelVariant.COMPACT:
        return min(1.0, kernel.diameter)
    return min(1.0, 1.0 / kernel.decay)


def check_resolution(kernel: Optional[KernelBound], grid: UniformGrid, input_scale: float = math.inf):
    scales = [input_scale]
    if kernel is not None:
        scales.append(singularity_scale(kernel))
    scale = min(scales)
    if grid.h > RESOLUTION_SHARE * scale:
        raise GridError(f"Cell size {grid.h:.4g} exceeds {RESOLUTION_SHARE:g} x the singularity scale {scale:.4g}; "
                        f"use at least {int(math.ceil(2 * grid.half_width / (RESOLUTION_SHARE * scale)))} points")


def _zero_class(kernel: KernelBound) -> Growth:
    if kernel.alpha < kernel.dim:
        return Growth(power=kernel.alpha - kernel.dim)
    if kernel.alpha == kernel.dim:
        return Growth(log=1.0)
    return Growth()


def _corner_average(fn: Callable[[np.ndarray], np.ndarray], hint: Growth, side: float, dim: int) -> float:
    """Average of fn(|x|) over the cube [0, side]^d, fn possibly singular at 0."""

    def radial_mass(rho: float, power: int) -> float:
        integrand = Integrand(eval=lambda r: fn(r) * np.asarray(r) ** power,
                              singularity_hint_zero=hint + Growth(power=power))
        result = integrate(integrand, 0.0, rho, tol=1e-10)
        if not result.is_finite:
            raise GridError(f"Radial function with class {hint} is not locally integrable in d={dim}")
        return float(result.value)

    if dim == 1:
        return radial_mass(side, 0) / side
    # the square is two triangles 0 <= theta <= pi/4, 0 <= r <= side / cos(theta)
    x, w = np.polynomial.legendre.leggauss(CENTER_ANGLES)
    theta = (x + 1.0) * math.pi / 8.0
    masses = np.array([radial_mass(side / math.cos(t), 1) for t in theta])
    return float(2.0 * np.sum(w * masses) * (math.pi / 8.0) / side ** 2)


def _cell_rule(grid: UniformGrid, order: int) -> Tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(order)
    return x * grid.h / 2.0, w / 2.0


@lru_cache(maxsize=16)
def kernel_cell_averages(kernel: KernelBound, grid: UniformGrid) -> np.ndarray:
    """Averages of A(|x|) over the cells centred at k h, |k_i| <= N - 1; read-only."""
    n = grid.points
    offsets = np.arange(-(n - 1), n) * grid.h
    sub, weights = _cell_rule(grid, CELL_ORDER[grid.dim])
    center = n - 1
    if grid.dim == 1:
        pts = np.abs(offsets[:, None] + sub[None, :])
        pts[center] = 1.0  # the origin cell is replaced below
        out = np.asarray(eval_kernel_bound(kernel, pts)) @ weights
    else:
        ox, oy = np.meshgrid(offsets, offsets, indexing="ij")
        out = np.zeros(ox.shape)
        for sx, wx in zip(sub, weights):
            for sy, wy in zip(sub, weights):
                r = np.hypot(ox + sx, oy + sy)
                r[center, center] = 1.0
                out += wx * wy * np.asarray(eval_kernel_bound(kernel, r))
    out[(center,) * grid.dim] = _corner_average(lambda r: eval_kernel_bound(kernel, r), _zero_class(kernel),
                                                grid.h / 2.0, grid.dim)
    out.setflags(write=False)
    return out


@lru_cache(maxsize=32)
def cell_weight_averages(weight: WeightExpr, grid: UniformGrid) -> np.ndarray:
    """Averages of w(|x|) over every grid cell; read-only.

    The cells touching the origin are cubes [0, h]^d up to reflection and take the radial
    quadrature; the rest use a tensor Gauss-Legendre rule.
    """
    sub, weights = _cell_rule(grid, WEIGHT_ORDER[grid.dim])
    axis = grid.axis
    if grid.dim == 1:
        pts = np.abs(axis[:, None] + sub[None, :])
        out = np.asarray(weight.eval(pts)) @ weights
    else:
        gx, gy = grid.coords()
        out = np.zeros(grid.shape)
        with np.errstate(divide="ignore", over="ignore"):
            for sx, wx in zip(sub, weights):
                for sy, wy in zip(sub, weights):
                    out += wx * wy * np.asarray(weight.eval(np.hypot(gx + sx, gy + sy)))
    mid = grid.points // 2
    corner = _corner_average(weight.eval, weight.growth(End.ZERO), grid.h, grid.dim)
    block = tuple(slice(mid - 1, mid + 1) for _ in range(grid.dim))
    out[block] = corner
    out.setflags(write=False)
    return out


def point_weights(weight: WeightExpr, grid: UniformGrid) -> np.ndarray:
    """w(|x|) at the nodes."""
    return np.asarray(weight.eval(grid.radii()))


def synthesize(g_values: np.ndarray, kernel: Optional[KernelBound], grid: UniformGrid) -> np.ndarray:
    """f = g * A on the grid; with no kernel f = g."""
    if kernel is None:
        return np.array(g_values, dtype=float)
    if not np.any(g_values):
        return np.zeros(grid.shape)
    averages = kernel_cell_averages(kernel, grid)
    full = fftconvolve(g_values, averages, mode="full")
    n = grid.points
    window = tuple(slice(n - 1, 2 * n - 1) for _ in range(grid.dim))
    # transforms leave rounding noise of either sign around exact zeros
    return np.abs(full[window]) * grid.cell_volume


def weighted_norm(values: np.ndarray, exponent: float, grid: UniformGrid,
                  weight: Optional[np.ndarray] = None) -> float:
    """(sum |v|^e w h^d)^(1/e)."""
    magnitude = np.abs(values) ** exponent
    if weight is not None:
        magnitude = magnitude * weight
    return float((np.sum(magnitude) * grid.cell_volume) ** (1.0 / exponent))


def pairwise_kernel(kernel: Optional[KernelBound], grid: UniformGrid, rows: np.ndarray,
                    cols: np.ndarray) -> np.ndarray:
    """Kernel cell averages K(x_i - y_j) for flat node indices; identity without a kernel."""
    n = grid.points
    if kernel is None:
        return (rows[:, None] == cols[None, :]).astype(float) / grid.cell_volume
    averages = kernel_cell_averages(kernel, grid)
    if grid.dim == 1:
        return averages[rows[:, None] - cols[None, :] + n - 1]
    ri, rj = np.divmod(rows, n)
    ci, cj = np.divmod(cols, n)
    return averages[ri[:, None] - ci[None, :] + n - 1, rj[:, None] - cj[None, :] + n - 1]
