# src/hardyprobe/inequalities/conditions.py
"""Admissibility conditions per inequality kind, and the reductions between kinds.

Each kind owns an ordered list of named conditions.  ``validate`` evaluates all of them and
never raises; a condition that cannot be evaluated counts as violated.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

from pydantic import BaseModel, Field

from .specs import InequalityKind, InequalitySpec

logger = logging.getLogger(__name__)

# slack on the non-strict scaling comparisons
SCALING_EPS = 1e-12

Predicate = Callable[[InequalitySpec], bool]


@dataclass(frozen=True)
class Condition:
    name: str
    text: str
    holds: Predicate


class AdmissibilityReport(BaseModel):
    """Result of validating one spec."""
    name: str
    kind: str
    admissible: bool
    derived: Dict[str, float] = Field(default_factory=dict)
    conditions: Dict[str, bool] = Field(default_factory=dict)
    violations: List[str] = Field(default_factory=list)

    def to_record(self) -> Dict[str, object]:
        return self.model_dump()


def _le(a: float, b: float) -> bool:
    return a <= b + SCALING_EPS


# --- condition builders -----------------------------------------------------------------


def _open_unit_exponent(symbol: str) -> Condition:
    return Condition(f"{symbol}_range", f"1 < {symbol} < inf",
                     lambda s: 1.0 < s.params[symbol] < math.inf)


def _positive(symbol: str) -> Condition:
    return Condition(f"{symbol}_positive", f"0 < {symbol} < inf",
                     lambda s: 0.0 < s.params[symbol] < math.inf)


def _theta_conditions(q: str, r: str) -> List[Condition]:
    return [
        Condition("theta_range", "0 < theta <= 1", lambda s: 0.0 < s.theta <= 1.0),
        Condition("theta_holder", f"theta > ({r} - {q}) / {r}",
                  lambda s: s.theta > (s.params[r] - s.params[q]) / s.params[r]),
    ]


def _sobolev_embedding_conditions() -> List[Condition]:
    return [
        _open_unit_exponent("p"),
        _open_unit_exponent("q"),
        Condition("beta_range", "0 <= beta < d", lambda s: 0.0 <= s.beta < s.dim),
        Condition("alpha_range", "0 < alpha < d", lambda s: 0.0 < s.alpha < s.dim),
        Condition("q_ge_p", "q >= p", lambda s: s.q >= s.p),
        Condition("scaling", "1/p - 1/q <= alpha/d - beta/(d q)",
                  lambda s: _le(1.0 / s.p - 1.0 / s.q, s.alpha / s.dim - s.beta / (s.dim * s.q))),
    ]


def _critical_conditions() -> List[Condition]:
    return [
        Condition("p_r_order", "1 < p < r < inf", lambda s: 1.0 < s.p < s.r < math.inf),
        Condition("q_interval", "p <= q < (r - 1) p'",
                  lambda s: s.p <= s.q < (s.r - 1.0) * s.p_conj),
    ]


def _ckn_shift(s: InequalitySpec) -> float:
    """qr (b(1-theta) - a) / (q - (1-theta) r)."""
    denominator = s.q - (1.0 - s.theta) * s.r
    if denominator <= 0.0:
        return math.nan
    return s.q * s.r * (s.b * (1.0 - s.theta) - s.a) / denominator


def _ckn_scaling(s: InequalitySpec) -> bool:
    lhs = 1.0 / s.p - (s.q - (1.0 - s.theta) * s.r) / (s.q * s.r * s.theta)
    rhs = s.alpha / s.dim - (s.b * (1.0 - s.theta) - s.a) / (s.theta * s.dim)
    return _le(lhs, rhs)


def _gn_scaling(s: InequalitySpec) -> bool:
    lhs = 1.0 / s.p - (s.q - (1.0 - s.theta) * s.r) / (s.q * s.r * s.theta)
    return _le(lhs, s.alpha / s.dim)


def _interpolation_conditions() -> List[Condition]:
    return [
        _open_unit_exponent("p"),
        _positive("q"),
        _positive("r"),
        *_theta_conditions("q", "r"),
        Condition("p_le_q_tilde", "p <= qr theta / (q - (1-theta) r)", lambda s: s.p <= s.q_tilde),
        Condition("alpha_range", "0 < alpha < d", lambda s: 0.0 < s.alpha < s.dim),
    ]


def _hls_conditions() -> List[Condition]:
    return [
        _open_unit_exponent("p"),
        _open_unit_exponent("q"),
        Condition("alpha_range", "0 <= alpha < d", lambda s: 0.0 <= s.alpha < s.dim),
        Condition("beta_range", "0 <= beta < d/q", lambda s: 0.0 <= s.beta < s.dim / s.q),
        Condition("a1_range", "0 <= a1 < dp/(p+q)", lambda s: 0.0 <= s.a1 < s.dim * s.p / (s.p + s.q)),
        Condition("a2_range", "0 < a2 < d", lambda s: 0.0 < s.a2 < s.dim),
        Condition("f_side", "0 <= 1/p - q/(p+q) <= alpha/d",
                  lambda s: _le(0.0, 1.0 / s.p - s.q / (s.p + s.q))
                  and _le(1.0 / s.p - s.q / (s.p + s.q), s.alpha / s.dim)),
        Condition("g_side", "1/q - p/(p+q) <= (a2 - a1)/d",
                  lambda s: _le(1.0 / s.q - s.p / (s.p + s.q), (s.a2 - s.a1) / s.dim)),
    ]


class ConditionRegistry:
    """Registry of admissibility conditions keyed by inequality kind."""
    _conditions: Dict[InequalityKind, List[Condition]] = {
        InequalityKind.HARDY_SOBOLEV: _sobolev_embedding_conditions(),
        InequalityKind.UNCERTAINTY: _sobolev_embedding_conditions(),
        InequalityKind.HARDY: [
            _open_unit_exponent("p"),
            Condition("alpha_range", "0 <= alpha < d/p", lambda s: 0.0 <= s.alpha < s.dim / s.p),
        ],
        InequalityKind.CRITICAL_HARDY: _critical_conditions(),
        InequalityKind.UNCERTAINTY_CRITICAL: _critical_conditions(),
        InequalityKind.CKN: [
            *_interpolation_conditions(),
            Condition("shift_range", "0 <= qr(b(1-theta) - a)/(q - (1-theta) r) < d",
                      lambda s: 0.0 <= _ckn_shift(s) < s.dim),
            Condition("scaling", "1/p - (q - (1-theta) r)/(qr theta) <= alpha/d - (b(1-theta) - a)/(theta d)",
                      _ckn_scaling),
        ],
        InequalityKind.GN: [
            *_interpolation_conditions(),
            Condition("scaling", "1/p - (q - (1-theta) r)/(qr theta) <= alpha/d", _gn_scaling),
        ],
        InequalityKind.CRITICAL_CKN: [
            Condition("p1_r_order", "1 < p1 < r < inf", lambda s: 1.0 < s.p1 < s.r < math.inf),
            _positive("q1"),
            _positive("r1"),
            *_theta_conditions("q1", "r1"),
            Condition("q_tilde_interval", "p1 <= q1~ < (r - 1) p1'",
                      lambda s: s.p1 <= s.q_tilde < (s.r - 1.0) * s.p_conj),
        ],
        InequalityKind.HLS: _hls_conditions(),
    }

    @staticmethod
    def get_conditions(kind: InequalityKind) -> List[Condition]:
        return list(ConditionRegistry._conditions.get(InequalityKind(kind), []))

    @staticmethod
    def register_condition(kind: InequalityKind, condition: Condition):
        """Appends an extra condition to a kind; replaces one with the same name."""
        if not callable(condition.holds):
            raise TypeError("Condition predicate must be callable.")
        kind = InequalityKind(kind)
        existing = ConditionRegistry._conditions.setdefault(kind, [])
        for i, known in enumerate(existing):
            if known.name == condition.name:
                logger.warning(f"Overwriting condition '{condition.name}' for {kind.value}")
                existing[i] = condition
                return
        logger.info(f"Registering condition '{condition.name}' for {kind.value}")
        existing.append(condition)


def _safe(condition: Condition, spec: InequalitySpec) -> bool:
    try:
        return bool(condition.holds(spec))
    except (ArithmeticError, ValueError, KeyError, AttributeError) as e:
        logger.debug(f"Condition '{condition.name}' could not be evaluated for {spec.label}: {e}")
        return False


def _safe_derived(spec: InequalitySpec) -> Dict[str, float]:
    try:
        return spec.derived()
    except (ArithmeticError, ValueError) as e:
        logger.debug(f"Derived exponents unavailable for {spec.label}: {e}")
        return {}


def validate(spec: InequalitySpec) -> AdmissibilityReport:
    """Evaluates every condition of the spec's kind; the report lists the failing ones."""
    results: Dict[str, bool] = {}
    violations: List[str] = []
    for condition in ConditionRegistry.get_conditions(spec.kind):
        ok = _safe(condition, spec)
        results[condition.name] = ok
        if not ok:
            violations.append(f"{condition.name}: {condition.text}")
    report = AdmissibilityReport(
        name=spec.label,
        kind=spec.kind.value,
        admissible=not violations,
        derived=_safe_derived(spec),
        conditions=results,
        violations=violations,
    )
    if violations:
        logger.debug(f"{spec.label} is inadmissible: {violations}")
    return report


def reduce(spec: InequalitySpec) -> Optional[InequalitySpec]:
    """The special case a spec collapses to, if any.

    CKN (and GN) with theta = 1 is the Hardy-Sobolev inequality with q = r and beta = -ar;
    CKN with a = b = 0 is GN; Hardy-Sobolev with q = p and beta = alpha p is Hardy.
    """
    kind = spec.kind
    if kind in (InequalityKind.CKN, InequalityKind.GN) and spec.theta == 1.0:
        beta = -spec.a * spec.r if kind == InequalityKind.CKN else 0.0
        return InequalitySpec(
            InequalityKind.HARDY_SOBOLEV,
            {"p": spec.p, "q": spec.r, "alpha": spec.alpha, "beta": beta + 0.0},
            spec.space, spec.char_rate,
        )
    if kind == InequalityKind.CKN and spec.a == 0.0 and spec.b == 0.0:
        return InequalitySpec(
            InequalityKind.GN,
            {"p": spec.p, "q": spec.q, "r": spec.r, "theta": spec.theta, "alpha": spec.alpha},
            spec.space, spec.char_rate,
        )
    if kind == InequalityKind.HARDY_SOBOLEV and spec.q == spec.p and math.isclose(spec.beta, spec.alpha * spec.p):
        return InequalitySpec(InequalityKind.HARDY, {"p": spec.p, "alpha": spec.alpha}, spec.space, spec.char_rate)
    return None
