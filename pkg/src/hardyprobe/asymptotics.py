# src/hardyprobe/asymptotics.py
"""Leading-order growth classes of positive radial functions at r -> 0 and r -> infinity.

A class is the scale ``e^(rate*r) * r^power * L^log * (log L)^loglog``.  Near zero
``L = log(1/r)`` and the exponential factor tends to one; near infinity ``L = log r``.
Products of functions add classes, powers scale them, and the integral rules below give
the class of ``int_0^R``, ``int_R^1``, ``int_R^inf`` and ``int_1^R`` as R approaches the end.
"""

from dataclasses import dataclass
from enum import Enum
from typing import Optional, Tuple

# Exponent ties closer than this are treated as exact.
EXPONENT_EPS = 1e-12


class End(str, Enum):
    ZERO = "zero"
    INFINITY = "infinity"


@dataclass(frozen=True)
class Growth:
    rate: float = 0.0
    power: float = 0.0
    log: float = 0.0
    loglog: float = 0.0

    def __add__(self, other: "Growth") -> "Growth":
        return Growth(
            self.rate + other.rate,
            self.power + other.power,
            self.log + other.log,
            self.loglog + other.loglog,
        )

    def __mul__(self, t: float) -> "Growth":
        return Growth(self.rate * t, self.power * t, self.log * t, self.loglog * t)

    __rmul__ = __mul__

    def key(self, end: End) -> Tuple[float, ...]:
        """Lexicographic size key; positive means the function blows up at ``end``."""
        if end == End.ZERO:
            return (-self.power, self.log, self.loglog)
        return (self.rate, self.power, self.log, self.loglog)

    def at(self, end: End) -> "Growth":
        """Drops the components that are constant at ``end``."""
        if end == End.ZERO:
            return Growth(0.0, self.power, self.log, self.loglog)
        return self

    def is_unbounded(self, end: End) -> bool:
        return _sign(self.key(end)) > 0

    def is_vanishing(self, end: End) -> bool:
        return _sign(self.key(end)) < 0


CONSTANT = Growth()


def _sign(key: Tuple[float, ...]) -> int:
    for component in key:
        if component > EXPONENT_EPS:
            return 1
        if component < -EXPONENT_EPS:
            return -1
    return 0


def _tie(x: float, target: float) -> bool:
    return abs(x - target) <= EXPONENT_EPS


def converges_at(g: Growth, end: End) -> bool:
    """Whether ``g`` is integrable (in dr) at ``end``."""
    if end == End.ZERO:
        return integrate_at_zero(g) is not None
    return integrate_at_infinity(g) is not None


def integrate_at_zero(g: Growth) -> Optional[Growth]:
    """Class of ``int_0^R g`` as R -> 0, or None when the integral diverges at zero."""
    if g.power > -1.0 + EXPONENT_EPS:
        return Growth(0.0, g.power + 1.0, g.log, g.loglog)
    if not _tie(g.power, -1.0):
        return None
    # int_0^R dr / (r L^-b) with L = log(1/r): substitute u = L.
    if g.log < -1.0 - EXPONENT_EPS:
        return Growth(0.0, 0.0, g.log + 1.0, g.loglog)
    if _tie(g.log, -1.0) and g.loglog < -1.0 - EXPONENT_EPS:
        return Growth(0.0, 0.0, 0.0, g.loglog + 1.0)
    return None


def integrate_from_zero_tail(g: Growth) -> Growth:
    """Class of ``int_R^1 g`` as R -> 0 (CONSTANT when g is integrable at zero)."""
    if integrate_at_zero(g) is not None:
        return CONSTANT
    if g.power < -1.0 - EXPONENT_EPS:
        return Growth(0.0, g.power + 1.0, g.log, g.loglog)
    if g.log > -1.0 + EXPONENT_EPS:
        return Growth(0.0, 0.0, g.log + 1.0, g.loglog)
    if g.loglog > -1.0 + EXPONENT_EPS:
        return Growth(0.0, 0.0, 0.0, g.loglog + 1.0)
    # log log log growth; slower than any class but still unbounded
    return Growth(0.0, 0.0, 0.0, EXPONENT_EPS * 10)


def integrate_at_infinity(g: Growth) -> Optional[Growth]:
    """Class of ``int_R^inf g`` as R -> inf, or None when the integral diverges."""
    if g.rate < -EXPONENT_EPS:
        return g
    if not _tie(g.rate, 0.0):
        return None
    if g.power < -1.0 - EXPONENT_EPS:
        return Growth(0.0, g.power + 1.0, g.log, g.loglog)
    if not _tie(g.power, -1.0):
        return None
    if g.log < -1.0 - EXPONENT_EPS:
        return Growth(0.0, 0.0, g.log + 1.0, g.loglog)
    if _tie(g.log, -1.0) and g.loglog < -1.0 - EXPONENT_EPS:
        return Growth(0.0, 0.0, 0.0, g.loglog + 1.0)
    return None


def integrate_to_infinity(g: Growth) -> Growth:
    """Class of ``int_1^R g`` as R -> inf (CONSTANT when g is integrable at infinity)."""
    if integrate_at_infinity(g) is not None:
        return CONSTANT
    if g.rate > EXPONENT_EPS:
        return g
    if g.power > -1.0 + EXPONENT_EPS:
        return Growth(0.0, g.power + 1.0, g.log, g.loglog)
    if g.log > -1.0 + EXPONENT_EPS:
        return Growth(0.0, 0.0, g.log + 1.0, g.loglog)
    if g.loglog > -1.0 + EXPONENT_EPS:
        return Growth(0.0, 0.0, 0.0, g.loglog + 1.0)
    return Growth(0.0, 0.0, 0.0, EXPONENT_EPS * 10)


def ball_integral(g: Growth, end: End) -> Optional[Growth]:
    """Class of ``int_0^R g`` as R approaches ``end``; None if divergent at zero."""
    if end == End.ZERO:
        return integrate_at_zero(g)
    return integrate_to_infinity(g)


def complement_integral(g: Growth, end: End) -> Optional[Growth]:
    """Class of ``int_R^inf g`` as R approaches ``end``; None if divergent at infinity."""
    if end == End.ZERO:
        return integrate_from_zero_tail(g)
    return integrate_at_infinity(g)
