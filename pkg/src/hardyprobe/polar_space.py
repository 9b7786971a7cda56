# src/hardyprobe/polar_space.py
"""Radial density models S(r) of spaces with a polar decomposition dx = S(r) dr dsigma."""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np
from scipy import special

from .asymptotics import End, Growth
from .errors import ParameterError
from .quadrature import Integrand, integrate
from .weights import WeightExpr

logger = logging.getLogger(__name__)


class DensityKind(str, Enum):
    EUCLIDEAN = "euclidean"
    HOMOGENEOUS = "homogeneous"
    HYPERBOLIC = "hyperbolic"
    LOCAL_GLOBAL = "local_global"


def sphere_area(d: float) -> float:
    """Surface measure of the unit sphere in R^d, 2 pi^(d/2) / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2.0) / special.gamma(d / 2.0)


@dataclass(frozen=True)
class PolarSpace:
    """A space described by its radial density.

    ``dim`` is d for Euclidean and local/global models, Q for homogeneous groups and n for
    hyperbolic space.  ``kappa`` is the global growth rate of the local/global model.
    ``sigma`` overrides the sphere constant; by default it is the Euclidean sphere area for
    Euclidean and hyperbolic spaces and 1 otherwise.
    """
    kind: DensityKind
    dim: float
    kappa: float = 0.0
    sigma: Optional[float] = None
    name: str = ""

    def __post_init__(self):
        if not self.dim > 0:
            raise ParameterError(f"Space dimension must be positive, got {self.dim}")
        if self.kind == DensityKind.HYPERBOLIC and self.dim < 2:
            raise ParameterError(f"Hyperbolic space needs n >= 2, got {self.dim}")
        if self.kappa < 0:
            raise ParameterError(f"Growth rate kappa must be nonnegative, got {self.kappa}")
        if self.sigma is not None and not self.sigma > 0:
            raise ParameterError(f"Sphere constant must be positive, got {self.sigma}")

    @classmethod
    def euclidean(cls, d: float, sigma: Optional[float] = None) -> "PolarSpace":
        return cls(DensityKind.EUCLIDEAN, d, sigma=sigma, name=f"R^{d:g}")

    @classmethod
    def half_line(cls) -> "PolarSpace":
        """The one-dimensional model with S = 1; radial integrals are plain integrals on (0, inf)."""
        return cls(DensityKind.EUCLIDEAN, 1.0, sigma=1.0, name="half-line")

    @classmethod
    def homogeneous(cls, Q: float, sigma: Optional[float] = None) -> "PolarSpace":
        return cls(DensityKind.HOMOGENEOUS, Q, sigma=sigma, name=f"homogeneous(Q={Q:g})")

    @classmethod
    def hyperbolic(cls, n: float, sigma: Optional[float] = None) -> "PolarSpace":
        return cls(DensityKind.HYPERBOLIC, n, sigma=sigma, name=f"H^{n:g}")

    @classmethod
    def local_global(cls, d: float, kappa: float, sigma: Optional[float] = None) -> "PolarSpace":
        return cls(DensityKind.LOCAL_GLOBAL, d, kappa=kappa, sigma=sigma, name=f"local-global(d={d:g}, kappa={kappa:g})")

    @property
    def sphere_constant(self) -> float:
        if self.sigma is not None:
            return self.sigma
        if self.kind in (DensityKind.EUCLIDEAN, DensityKind.HYPERBOLIC):
            return sphere_area(self.dim)
        return 1.0

    @property
    def local_dim(self) -> float:
        """Exponent d with V(r) ~ r^d as r -> 0."""
        return self.dim

    @property
    def global_rate(self) -> float:
        """Exponential volume growth rate at infinity."""
        if self.kind == DensityKind.HYPERBOLIC:
            return self.dim - 1.0
        if self.kind == DensityKind.LOCAL_GLOBAL:
            return self.kappa
        return 0.0

    def log_density(self, r):
        """log S(r), vectorized."""
        r = np.asarray(r, dtype=float)
        return self.log_density_excess(r) + self.global_rate * r

    def log_density_excess(self, r):
        """log S(r) - global_rate * r; bounded at infinity for the exponentially growing models."""
        r = np.asarray(r, dtype=float)
        if np.any(r < 0):
            raise ParameterError("Density is only defined for r >= 0")
        log_sigma = math.log(self.sphere_constant)
        with np.errstate(divide="ignore"):
            log_r = np.log(r)
            # sinh r = e^r (1 - e^(-2r)) / 2
            log_sinh_excess = np.log(-np.expm1(-2.0 * r)) - math.log(2.0)
        if self.kind in (DensityKind.EUCLIDEAN, DensityKind.HOMOGENEOUS):
            return log_sigma + (self.dim - 1.0) * log_r
        if self.kind == DensityKind.HYPERBOLIC:
            if self.dim == 1.0:
                return np.full(r.shape, log_sigma)
            return log_sigma + (self.dim - 1.0) * log_sinh_excess
        inner = log_sigma + (self.dim - 1.0) * log_r - self.kappa * r
        outer = np.full(r.shape, log_sigma - self.kappa)
        return np.where(r <= 1.0, inner, outer)

    def density(self, r):
        """S(r), vectorized."""
        return np.exp(self.log_density(r))

    def density_growth(self, end: End) -> Growth:
        if end == End.ZERO:
            return Growth(power=self.dim - 1.0)
        if self.kind == DensityKind.HYPERBOLIC:
            return Growth(rate=self.dim - 1.0)
        if self.kind == DensityKind.LOCAL_GLOBAL:
            return Growth(rate=self.kappa)
        return Growth(power=self.dim - 1.0)

    def breakpoints(self) -> tuple:
        return (1.0,) if self.kind == DensityKind.LOCAL_GLOBAL else ()

    def volume(self, r: float) -> float:
        """V(r) = int_0^r S."""
        if r < 0:
            raise ParameterError(f"Radius must be nonnegative, got {r}")
        if r == 0:
            return 0.0
        c = self.sphere_constant
        d = self.dim
        if self.kind in (DensityKind.EUCLIDEAN, DensityKind.HOMOGENEOUS):
            return c * r ** d / d
        if self.kind == DensityKind.LOCAL_GLOBAL:
            if r <= 1.0:
                return c * r ** d / d
            if self.kappa == 0.0:
                return c / d + c * (r - 1.0)
            return c / d + c * math.expm1(self.kappa * (r - 1.0)) / self.kappa
        if d == 2:
            return c * (math.cosh(r) - 1.0)
        if d == 3:
            return c * (math.sinh(2.0 * r) / 2.0 - r) / 2.0
        density = Integrand(eval=self.density, singularity_hint_zero=self.density_growth(End.ZERO))
        result = integrate(density, 0.0, r)
        return float(result.value)

    def describe(self) -> dict:
        return {
            "kind": self.kind.value,
            "dim": self.dim,
            "kappa": self.kappa,
            "sigma": self.sphere_constant,
        }


@dataclass(frozen=True)
class CharacterSurrogate:
    """Radial surrogate e^(s * rate * r) for chi^s with chi bounded by e^(rate * r) on balls."""
    rate: float
    exponent: float = 1.0

    def factor(self, r):
        return np.exp(self.exponent * self.rate * np.asarray(r, dtype=float))

    def as_weight(self):
        return WeightExpr(exprate=self.exponent * self.rate)
