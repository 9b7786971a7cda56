# src/hardyprobe/kernels.py
"""Bessel-type convolution kernels: piecewise majorants, the exact Euclidean kernel, tail
integrability and Young's inequality on the integer lattice."""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy import special

from .asymptotics import End, Growth
from .errors import ExponentError, ParameterError
from .polar_space import PolarSpace
from .quadrature import DEFAULT_TOL, Integrand, integrate
from .weights import Integrability, PiecewiseWeight, WeightExpr

logger = logging.getLogger(__name__)

DEFAULT_DIAMETER = math.pi
SCALING_EPS = 1e-12


class KernelVariant(str, Enum):
    NONCOMPACT = "noncompact"
    COMPACT = "compact"
    EUCLIDEAN_BESSEL = "euclidean_bessel"


@dataclass(frozen=True)
class KernelBound:
    """Radial majorant A_alpha of the kernel of (Delta + c)^(-alpha/2).

    noncompact: C r^(alpha-d) (C log(1/r) when alpha = d) near the origin and
    C e^((char_rate/2 - c') r) for r > 1.
    compact: C r^(alpha-d) up to the diameter, 0 beyond.
    euclidean_bessel: the exact Euclidean kernel with mass c, times C.
    """
    variant: KernelVariant
    alpha: float
    dim: float
    normalization: float = 1.0
    c_prime: Optional[float] = None
    char_rate: float = 0.0
    growth_rate: float = 0.0
    diameter: float = DEFAULT_DIAMETER
    c: float = 1.0

    def __post_init__(self):
        if not isinstance(self.variant, KernelVariant):
            object.__setattr__(self, "variant", KernelVariant(self.variant))
        if not self.alpha > 0:
            raise ParameterError(f"Kernel order alpha must be positive, got {self.alpha}")
        if not self.dim > 0:
            raise ParameterError(f"Kernel dimension must be positive, got {self.dim}")
        if not self.normalization > 0:
            raise ParameterError(f"Kernel normalization must be positive, got {self.normalization}")
        if self.char_rate < 0 or self.growth_rate < 0:
            raise ParameterError("Character and growth rates must be nonnegative")
        if self.variant == KernelVariant.NONCOMPACT and self.alpha > self.dim:
            raise ParameterError(f"Noncompact bound needs alpha <= d, got alpha={self.alpha}, d={self.dim}")
        if self.variant == KernelVariant.COMPACT:
            if self.alpha >= self.dim:
                raise ParameterError(f"Compact bound needs alpha < d, got alpha={self.alpha}, d={self.dim}")
            if not self.diameter > 0:
                raise ParameterError(f"Diameter must be positive, got {self.diameter}")
        if self.variant == KernelVariant.EUCLIDEAN_BESSEL:
            if self.dim != int(self.dim):
                raise ParameterError(f"Euclidean kernel needs an integer dimension, got {self.dim}")
            if not self.c > 0:
                raise ParameterError(f"Kernel mass c must be positive, got {self.c}")
        if self.c_prime is not None and not self.c_prime > 0:
            raise ParameterError(f"Decay rate c' must be positive, got {self.c_prime}")

    @classmethod
    def noncompact(cls, alpha: float, dim: float, c_prime: Optional[float] = None, char_rate: float = 0.0,
                   growth_rate: float = 0.0, normalization: float = 1.0) -> "KernelBound":
        return cls(KernelVariant.NONCOMPACT, alpha, dim, normalization, c_prime, char_rate, growth_rate)

    @classmethod
    def compact(cls, alpha: float, dim: float, normalization: float = 1.0,
                diameter: float = DEFAULT_DIAMETER) -> "KernelBound":
        return cls(KernelVariant.COMPACT, alpha, dim, normalization, diameter=diameter)

    @classmethod
    def euclidean_bessel(cls, alpha: float, dim: int, c: float = 1.0, normalization: float = 1.0) -> "KernelBound":
        return cls(KernelVariant.EUCLIDEAN_BESSEL, alpha, float(dim), normalization, c=c)

    @property
    def decay(self) -> float:
        """c', defaulting to 4 (char_rate/2 + growth_rate), at least 1."""
        if self.c_prime is not None:
            return self.c_prime
        return max(4.0 * (self.char_rate / 2.0 + self.growth_rate), 1.0)

    @property
    def far_rate(self) -> float:
        return self.char_rate / 2.0 - self.decay

    def eval(self, r):
        return eval_kernel_bound(self, r)

    __call__ = eval

    def as_weight(self, dilation: float = 1.0, power: float = 1.0) -> PiecewiseWeight:
        """A(r / dilation)^power as a two-branch weight split at r = dilation."""
        if self.variant != KernelVariant.NONCOMPACT:
            raise ParameterError(f"Only noncompact bounds have a weight form, got {self.variant.value}")
        if self.alpha == self.dim:
            raise ParameterError("The log branch at alpha = d has no weight form")
        if not dilation > 0:
            raise ParameterError(f"Dilation must be positive, got {dilation}")
        exponent = (self.alpha - self.dim) * power
        scale = self.normalization ** power
        inner = WeightExpr(power=exponent, scale=scale * dilation ** (-exponent))
        outer = WeightExpr(exprate=self.far_rate * power / dilation, scale=scale)
        return PiecewiseWeight(inner, outer, split=dilation)

    def describe(self) -> Dict[str, Any]:
        out = {
            "variant": self.variant.value,
            "alpha": self.alpha,
            "dim": self.dim,
            "normalization": self.normalization,
        }
        if self.variant == KernelVariant.NONCOMPACT:
            out.update({"c_prime": self.decay, "char_rate": self.char_rate, "growth_rate": self.growth_rate})
        elif self.variant == KernelVariant.COMPACT:
            out["diameter"] = self.diameter
        else:
            out["c"] = self.c
        return out


def _as_radii(r) -> np.ndarray:
    radii = np.asarray(r, dtype=float)
    if np.any(radii <= 0):
        raise ParameterError("Kernel bounds are evaluated at r > 0 only")
    return radii


def eval_kernel_bound(kb: KernelBound, r):
    """Piecewise majorant at r > 0; vectorized."""
    radii = _as_radii(r)
    C = kb.normalization
    if kb.variant == KernelVariant.EUCLIDEAN_BESSEL:
        out = C * bessel_closed_form(kb.alpha, int(kb.dim), kb.c, radii)
    elif kb.variant == KernelVariant.COMPACT:
        with np.errstate(divide="ignore"):
            out = np.where(radii <= kb.diameter, C * radii ** (kb.alpha - kb.dim), 0.0)
    elif kb.alpha == kb.dim:
        # log(1/r) is negative for r > 1; the log branch must stay on r < 1
        with np.errstate(divide="ignore", invalid="ignore"):
            out = np.where(radii < 1.0, C * np.log(1.0 / radii), C * np.exp(kb.far_rate * radii))
    else:
        with np.errstate(over="ignore"):
            out = np.where(radii <= 1.0, C * radii ** (kb.alpha - kb.dim), C * np.exp(kb.far_rate * radii))
    return float(out) if out.ndim == 0 else out


def check_monotone(kb: KernelBound, radii: Sequence[float]) -> bool:
    """Whether the bound is non-increasing along the sorted sample."""
    radii = np.sort(np.asarray(radii, dtype=float))
    values = np.asarray(eval_kernel_bound(kb, radii))
    rises = np.nonzero(np.diff(values) > 0.0)[0]
    if rises.size:
        i = int(rises[0])
        logger.warning(f"Kernel bound {kb.variant.value} rises between r={radii[i]:.6g} and r={radii[i + 1]:.6g}")
        return False
    return True


# --- Exact Euclidean kernel ---------------------------------------------------------------


def bessel_closed_form(alpha: float, d: int, c: float, r):
    """(4 pi)^(-d/2) / Gamma(alpha/2) * 2 (r / (2 sqrt c))^nu K_nu(r sqrt c), nu = (alpha - d)/2."""
    radii = _as_radii(r)
    nu = (alpha - d) / 2.0
    root = math.sqrt(c)
    log_front = -0.5 * d * math.log(4.0 * math.pi) - special.gammaln(alpha / 2.0) + math.log(2.0)
    with np.errstate(over="ignore", under="ignore"):
        # kve(nu, z) = K_nu(z) e^z keeps large arguments finite
        out = np.exp(log_front + nu * np.log(radii / (2.0 * root)) - radii * root) * special.kve(nu, radii * root)
    return float(out) if out.ndim == 0 else out


def eval_bessel_euclidean(alpha: float, d: int, c: float, r: float, tol: float = 1e-11) -> float:
    """Subordination integral 1/Gamma(alpha/2) int_0^inf t^(alpha/2-1) e^(-ct) (4 pi t)^(-d/2) e^(-r^2/4t) dt."""
    if not (alpha > 0 and c > 0 and r > 0):
        raise ParameterError(f"Need alpha > 0, c > 0 and r > 0, got alpha={alpha}, c={c}, r={r}")
    log_front = -special.gammaln(alpha / 2.0) - 0.5 * d * math.log(4.0 * math.pi)
    exponent = alpha / 2.0 - 1.0 - d / 2.0

    def integrand(t):
        t = np.asarray(t, dtype=float)
        with np.errstate(divide="ignore", over="ignore", under="ignore"):
            return np.exp(log_front + exponent * np.log(t) - c * t - r * r / (4.0 * t))

    # the Gaussian factor kills every power at t -> 0, so only the large-t class is hinted
    heat = Integrand(eval=integrand, decay_hint_infinity=Growth(rate=-c, power=exponent))
    result = integrate(heat, 0.0, math.inf, tol=tol, breakpoints=(r * r / 4.0,))
    return float(result.value)


def riesz_constant(alpha: float, d: float) -> float:
    """Gamma((d-alpha)/2) / (4^(alpha/2) pi^(d/2) Gamma(alpha/2)); the Riesz kernel dominates the Bessel one."""
    if not 0 < alpha < d:
        raise ParameterError(f"Riesz constant needs 0 < alpha < d, got alpha={alpha}, d={d}")
    return float(special.gamma((d - alpha) / 2.0) / (4.0 ** (alpha / 2.0) * math.pi ** (d / 2.0) * special.gamma(alpha / 2.0)))


def fit_domination_constant(radii: Sequence[float], values: Sequence[float], alpha: float, d: float) -> float:
    """Least C with value <= C r^(alpha-d) on the sample."""
    radii = np.asarray(radii, dtype=float)
    values = np.asarray(values, dtype=float)
    return float(np.max(values * radii ** (d - alpha)))


# --- Tail integrability -------------------------------------------------------------------


@dataclass
class TailVerdict:
    verdict: Integrability
    exponent_gap: float
    shell_log_terms: List[float] = field(default_factory=list)

    @property
    def converges(self) -> bool:
        return self.verdict == Integrability.CONVERGES


def _shell_log_terms(decay: float, space: PolarSpace, shells: int, order: int = 32) -> List[float]:
    """log int over [2^k, 2^(k+1)] of e^(-decay r) S(r) dr for k = 0..shells-1."""
    x, w = np.polynomial.legendre.leggauss(order)
    terms = []
    for k in range(shells):
        lo, hi = 2.0 ** k, 2.0 ** (k + 1)
        r = lo + (hi - lo) * (x + 1.0) / 2.0
        log_values = (space.global_rate - decay) * r + space.log_density_excess(r) + np.log(w * (hi - lo) / 2.0)
        terms.append(float(special.logsumexp(log_values)))
    return terms


def tail_integrability(a: float, s: float, c_prime: float, r_exp: float, space: PolarSpace,
                       rate_delta: float = 0.0, rate_chi: float = 0.0, shells: int = 24) -> TailVerdict:
    """Whether int over |x| > 1 of (delta^a chi^s e^(-c'|x|))^r_exp converges.

    delta^a chi^s is majorized by e^((|a| rate_delta + |s| rate_chi) r) on spheres, so the
    integral converges iff r_exp (c' - |a| rate_delta - |s| rate_chi) exceeds the volume
    growth rate.  A dyadic shell sum cross-checks the verdict.
    """
    if not c_prime > 0:
        raise ParameterError(f"Decay rate c' must be positive, got {c_prime}")
    if not r_exp > 0:
        raise ParameterError(f"Integrability exponent must be positive, got {r_exp}")
    decay = r_exp * (c_prime - abs(a) * rate_delta - abs(s) * rate_chi)
    gap = decay - space.global_rate
    verdict = Integrability.CONVERGES if gap > SCALING_EPS else Integrability.DIVERGES

    terms = _shell_log_terms(decay, space, shells)
    tail = terms[-4:]
    shells_shrink = all(later < earlier for earlier, later in zip(tail, tail[1:]))
    if shells_shrink != (verdict == Integrability.CONVERGES) and abs(gap) > 1e-3:
        logger.warning(f"Shell sums disagree with the exponent comparison (gap {gap:.4g})")
    return TailVerdict(verdict, gap, terms)


# --- Young's inequality on Z --------------------------------------------------------------


@dataclass(frozen=True)
class YoungResult:
    lhs: float
    rhs: float

    @property
    def passed(self) -> bool:
        return self.lhs <= self.rhs * (1.0 + 1e-12)

    def to_record(self) -> Dict[str, Any]:
        return {"lhs": self.lhs, "rhs": self.rhs, "pass": self.passed}


def _lp_norm(x: np.ndarray, p: float) -> float:
    return float(np.sum(x ** p) ** (1.0 / p))


def young_check(f: Sequence[float], g: Sequence[float], p: float, q: float, r: float) -> YoungResult:
    """||f*g||_q against ||f||_p ||g_check||_r^(r/p') ||g||_r^(r/q) for sequences on Z."""
    if not (1.0 < p <= q < math.inf) or r < 1.0:
        raise ExponentError(f"Need 1 < p <= q < inf and r >= 1, got p={p}, q={q}, r={r}")
    if abs(1.0 / p + 1.0 / r - 1.0 - 1.0 / q) > SCALING_EPS:
        raise ExponentError(f"Exponents violate 1/p + 1/r = 1 + 1/q: p={p}, q={q}, r={r}")
    f = np.asarray(f, dtype=float)
    g = np.asarray(g, dtype=float)
    if f.size == 0 or g.size == 0:
        raise ParameterError("Sequences must be non-empty")
    if np.any(f < 0) or np.any(g < 0):
        raise ParameterError("Sequences must be nonnegative")
    p_conj = p / (p - 1.0)
    conv = np.convolve(f, g)
    g_check = g[::-1]
    rhs = _lp_norm(f, p) * _lp_norm(g_check, r) ** (r / p_conj) * _lp_norm(g, r) ** (r / q)
    return YoungResult(lhs=_lp_norm(conv, q), rhs=rhs)


def kernel_from_config(data: Dict[str, Any], dim: Optional[float] = None) -> KernelBound:
    """Builds a KernelBound from a config mapping; ``dim`` fills a missing dimension."""
    data = dict(data)
    if "dim" not in data and dim is not None:
        data["dim"] = dim
    missing = {"variant", "alpha", "dim"} - set(data)
    if missing:
        raise ParameterError(f"Kernel is missing {sorted(missing)}")
    return KernelBound(**data)
