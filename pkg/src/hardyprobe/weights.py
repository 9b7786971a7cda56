# src/hardyprobe/weights.py
"""Radial weights as products of power, log(e+1/r) and exponential atoms.

Textual form: ``r^a * loge(1/r)^b * exp(k*r) * s``.  Atoms may appear in any order, may be
repeated (exponents add) and may be omitted.  Exponents accept ``-2``, ``(-1/2)`` or ``1e-3``.
A weight that changes form at a radius is a PiecewiseWeight with an inner and outer branch.
"""

import logging
import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import TYPE_CHECKING, Any, Dict, List, Tuple, Union

import numpy as np

from .asymptotics import EXPONENT_EPS, End, Growth, converges_at
from .errors import ParameterError, WeightParseError
from .quadrature import Integrand

if TYPE_CHECKING:
    from .polar_space import PolarSpace

logger = logging.getLogger(__name__)


def log_logplus(r):
    """log(log(e + 1/r)), stable for very small and very large r."""
    r = np.asarray(r, dtype=float)
    with np.errstate(divide="ignore", over="ignore"):
        return np.log1p(np.log1p(1.0 / (math.e * r)))


def _scalar_or_array(x, like):
    return float(x) if np.ndim(like) == 0 else x


@dataclass(frozen=True)
class WeightExpr:
    """scale * r^power * log(e+1/r)^logplus * e^(exprate*r)."""
    power: float = 0.0
    logplus: float = 0.0
    exprate: float = 0.0
    scale: float = 1.0

    def __post_init__(self):
        for name in ("power", "logplus", "exprate", "scale"):
            if not math.isfinite(getattr(self, name)):
                raise ParameterError(f"Weight atom '{name}' must be finite")
        if not self.scale > 0:
            raise ParameterError(f"Weight scale must be positive, got {self.scale}")

    def log_eval(self, r):
        r = np.asarray(r, dtype=float)
        out = np.full(r.shape, math.log(self.scale))
        with np.errstate(divide="ignore", invalid="ignore"):
            if self.power:
                out = out + self.power * np.log(r)
            if self.logplus:
                out = out + self.logplus * log_logplus(r)
            if self.exprate:
                out = out + self.exprate * r
        return _scalar_or_array(out, r)

    def eval(self, r):
        with np.errstate(over="ignore", under="ignore"):
            return _scalar_or_array(np.exp(self.log_eval(r)), r)

    __call__ = eval

    def power_transform(self, t: float) -> "WeightExpr":
        return WeightExpr(self.power * t, self.logplus * t, self.exprate * t, self.scale ** t)

    def __mul__(self, other):
        if isinstance(other, WeightExpr):
            return WeightExpr(
                self.power + other.power,
                self.logplus + other.logplus,
                self.exprate + other.exprate,
                self.scale * other.scale,
            )
        if isinstance(other, PiecewiseWeight):
            return other * self
        if isinstance(other, (int, float)):
            return WeightExpr(self.power, self.logplus, self.exprate, self.scale * float(other))
        return NotImplemented

    __rmul__ = __mul__

    def growth(self, end: End) -> Growth:
        if end == End.ZERO:
            return Growth(power=self.power, log=self.logplus)
        return Growth(rate=self.exprate, power=self.power)

    def breakpoints(self) -> Tuple[float, ...]:
        return ()

    def max_rate(self) -> float:
        return abs(self.exprate)


@dataclass(frozen=True)
class PiecewiseWeight:
    """``inner`` on (0, split], ``outer`` on (split, inf)."""
    inner: WeightExpr
    outer: WeightExpr
    split: float = 1.0

    def __post_init__(self):
        if not (0 < self.split < math.inf):
            raise ParameterError(f"Weight split must be a positive radius, got {self.split}")

    def log_eval(self, r):
        r = np.asarray(r, dtype=float)
        out = np.where(r <= self.split, self.inner.log_eval(r), self.outer.log_eval(r))
        return _scalar_or_array(out, r)

    def eval(self, r):
        with np.errstate(over="ignore", under="ignore"):
            return _scalar_or_array(np.exp(self.log_eval(r)), r)

    __call__ = eval

    def power_transform(self, t: float) -> "PiecewiseWeight":
        return PiecewiseWeight(self.inner.power_transform(t), self.outer.power_transform(t), self.split)

    def __mul__(self, other):
        if isinstance(other, PiecewiseWeight):
            if other.split != self.split:
                raise ParameterError("Piecewise weights with different splits cannot be multiplied")
            return PiecewiseWeight(self.inner * other.inner, self.outer * other.outer, self.split)
        if isinstance(other, (WeightExpr, int, float)):
            return PiecewiseWeight(self.inner * other, self.outer * other, self.split)
        return NotImplemented

    __rmul__ = __mul__

    def growth(self, end: End) -> Growth:
        branch = self.inner if end == End.ZERO else self.outer
        return branch.growth(end)

    def breakpoints(self) -> Tuple[float, ...]:
        return (self.split,)

    def max_rate(self) -> float:
        return max(self.inner.max_rate(), self.outer.max_rate())


Weight = Union[WeightExpr, PiecewiseWeight]

ONE = WeightExpr()


# --- Integrability ------------------------------------------------------------------------


class Integrability(str, Enum):
    CONVERGES = "converges"
    DIVERGES = "diverges"


@dataclass(frozen=True)
class IntegrabilityClass:
    """Verdict for int w S dr at one end.

    ``borderline`` marks the critical power, where the log atom decides.
    """
    verdict: Integrability
    borderline: bool = False

    @property
    def converges(self) -> bool:
        return self.verdict == Integrability.CONVERGES


def integrability_class(w: Weight, space: "PolarSpace", end: End) -> IntegrabilityClass:
    g = w.growth(end) + space.density_growth(end)
    verdict = Integrability.CONVERGES if converges_at(g, end) else Integrability.DIVERGES
    if end == End.ZERO:
        borderline = abs(g.power + 1.0) <= EXPONENT_EPS
    else:
        borderline = abs(g.rate) <= EXPONENT_EPS and abs(g.power + 1.0) <= EXPONENT_EPS
    return IntegrabilityClass(verdict, borderline)


def radial_integrand(w: Weight, space: "PolarSpace") -> Integrand:
    """w(r) S(r) as a quadrature integrand carrying its growth classes.

    The exponential rates of ``w`` and of the density are summed as numbers before evaluation.
    """
    folded = w * WeightExpr(exprate=space.global_rate)

    def value(r):
        with np.errstate(over="ignore", under="ignore"):
            return np.exp(folded.log_eval(r) + space.log_density_excess(r))

    return Integrand(
        eval=value,
        singularity_hint_zero=w.growth(End.ZERO) + space.density_growth(End.ZERO),
        decay_hint_infinity=w.growth(End.INFINITY) + space.density_growth(End.INFINITY),
    )


# --- Textual form -------------------------------------------------------------------------

_NUMBER = re.compile(r"[-+]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][-+]?\d+)?")


def _number(text: str) -> float:
    body = text.strip()
    if body.startswith("(") and body.endswith(")"):
        body = body[1:-1].strip()
    if "/" in body:
        num, _, den = body.partition("/")
        if _NUMBER.fullmatch(num.strip()) and _NUMBER.fullmatch(den.strip()):
            denominator = float(den)
            if denominator == 0:
                raise ValueError("zero denominator")
            return float(num) / denominator
        raise ValueError(f"not a number: {text!r}")
    if _NUMBER.fullmatch(body):
        return float(body)
    raise ValueError(f"not a number: {text!r}")


def _split_factors(text: str) -> List[Tuple[int, str]]:
    """Top-level '*' split; returns (offset, factor) pairs."""
    factors, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == "*" and depth == 0:
            factors.append((start, text[start:i]))
            start = i + 1
    factors.append((start, text[start:]))
    return factors


def _position(text: str, offset: int) -> Tuple[int, int]:
    line = text.count("\n", 0, offset) + 1
    column = offset - (text.rfind("\n", 0, offset) + 1) + 1
    return line, column


_EXP_ATOM = re.compile(r"exp\((?P<body>.*)\)")
_LOG_ATOM = re.compile(r"loge\(\s*1\s*/\s*r\s*\)(?:\^(?P<exp>.+))?")
_POWER_ATOM = re.compile(r"r(?:\^(?P<exp>.+))?")


def parse_weight(text: str) -> WeightExpr:
    """Parses the textual weight form; raises WeightParseError with the offending position."""
    if not isinstance(text, str):
        text = str(text)
    if not text.strip():
        raise WeightParseError("Empty weight expression", line=1, column=1)
    if text.count("(") != text.count(")"):
        raise WeightParseError(f"Unbalanced parentheses in weight '{text}'", line=1, column=1)

    power = logplus = exprate = 0.0
    scale = 1.0
    for offset, raw in _split_factors(text):
        factor = raw.strip()
        lead = offset + (len(raw) - len(raw.lstrip()))
        line, column = _position(text, lead)
        if not factor:
            raise WeightParseError(f"Missing factor in weight '{text}'", line=line, column=column)
        try:
            m = _LOG_ATOM.fullmatch(factor)
            if m:
                logplus += _number(m.group("exp")) if m.group("exp") else 1.0
                continue
            m = _EXP_ATOM.fullmatch(factor)
            if m:
                exprate += _exp_rate(m.group("body"))
                continue
            m = _POWER_ATOM.fullmatch(factor)
            if m:
                power += _number(m.group("exp")) if m.group("exp") else 1.0
                continue
            value = _number(factor)
        except ValueError as e:
            raise WeightParseError(f"Cannot read factor '{factor}': {e}", line=line, column=column) from e
        if not value > 0:
            raise WeightParseError(f"Weight scale must be positive, got '{factor}'", line=line, column=column)
        scale *= value
    return WeightExpr(power, logplus, exprate, scale)


def _exp_rate(body: str) -> float:
    body = body.replace(" ", "")
    if body == "r":
        return 1.0
    if body == "-r":
        return -1.0
    if body.endswith("*r"):
        return _number(body[:-2])
    raise ValueError(f"exponential atom must read exp(k*r), got exp({body})")


def _fmt(x: float) -> str:
    return repr(float(x))


def format_weight(w: WeightExpr) -> str:
    parts = []
    if w.power:
        parts.append(f"r^{_fmt(w.power)}")
    if w.logplus:
        parts.append(f"loge(1/r)^{_fmt(w.logplus)}")
    if w.exprate:
        parts.append(f"exp({_fmt(w.exprate)}*r)")
    if w.scale != 1.0 or not parts:
        parts.append(_fmt(w.scale))
    return " * ".join(parts)


def weight_from_config(obj: Any) -> Weight:
    """Accepts a weight string, a number or a mapping {inner, outer, split}."""
    if isinstance(obj, (WeightExpr, PiecewiseWeight)):
        return obj
    if isinstance(obj, dict):
        unknown = set(obj) - {"inner", "outer", "split"}
        if unknown or "inner" not in obj or "outer" not in obj:
            raise WeightParseError(f"Piecewise weight needs 'inner' and 'outer' (and optional 'split'), got {sorted(obj)}")
        return PiecewiseWeight(parse_weight(obj["inner"]), parse_weight(obj["outer"]), float(obj.get("split", 1.0)))
    if isinstance(obj, bool):
        raise WeightParseError(f"Not a weight: {obj!r}")
    if isinstance(obj, (int, float)):
        return parse_weight(_fmt(obj))
    return parse_weight(obj)


def weight_to_config(w: Weight) -> Union[str, Dict[str, Any]]:
    if isinstance(w, PiecewiseWeight):
        return {"inner": format_weight(w.inner), "outer": format_weight(w.outer), "split": w.split}
    return format_weight(w)
