# src/hardyprobe/inequalities/specs.py

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple

from ..errors import ParameterError
from ..polar_space import PolarSpace

logger = logging.getLogger(__name__)


class InequalityKind(str, Enum):
    HARDY_SOBOLEV = "hardy_sobolev"
    HARDY = "hardy"
    CRITICAL_HARDY = "critical_hardy"
    CKN = "ckn"
    GN = "gn"
    CRITICAL_CKN = "critical_ckn"
    HLS = "hls"
    UNCERTAINTY = "uncertainty"
    UNCERTAINTY_CRITICAL = "uncertainty_critical"


# Exactly the symbols each inequality is stated with.
KIND_PARAMS: Dict[InequalityKind, Tuple[str, ...]] = {
    InequalityKind.HARDY_SOBOLEV: ("p", "q", "alpha", "beta"),
    InequalityKind.HARDY: ("p", "alpha"),
    InequalityKind.CRITICAL_HARDY: ("p", "q", "r"),
    InequalityKind.CKN: ("p", "q", "r", "theta", "a", "b", "alpha"),
    InequalityKind.GN: ("p", "q", "r", "theta", "alpha"),
    InequalityKind.CRITICAL_CKN: ("p1", "q1", "r1", "theta", "a", "r"),
    InequalityKind.HLS: ("p", "q", "alpha", "beta", "a1", "a2"),
    InequalityKind.UNCERTAINTY: ("p", "q", "alpha", "beta"),
    InequalityKind.UNCERTAINTY_CRITICAL: ("p", "q", "r"),
}


def conjugate(p: float) -> float:
    """p' with 1/p + 1/p' = 1; infinite for p <= 1."""
    if p <= 1.0:
        return math.inf
    return p / (p - 1.0)


def interpolated_exponent(q: float, r: float, theta: float) -> float:
    """qr theta / (q - (1 - theta) r); infinite when the denominator is not positive."""
    denominator = q - (1.0 - theta) * r
    if denominator <= 0.0:
        return math.inf
    return q * r * theta / denominator


@dataclass(frozen=True)
class InequalitySpec:
    """One inequality instance: its kind, its parameters and the space it lives on.

    Parameters are read as attributes (``spec.p``, ``spec.theta``); derived exponents are
    properties and never stored.
    """
    kind: InequalityKind
    params: Mapping[str, float]
    space: PolarSpace = field(default_factory=lambda: PolarSpace.euclidean(1))
    char_rate: float = 0.0
    name: str = ""

    def __post_init__(self):
        if not isinstance(self.kind, InequalityKind):
            try:
                object.__setattr__(self, "kind", InequalityKind(self.kind))
            except ValueError:
                raise ParameterError(f"Unknown inequality kind '{self.kind}'. "
                                     f"Must be one of {[k.value for k in InequalityKind]}.")
        expected = set(KIND_PARAMS[self.kind])
        given = set(self.params)
        if given != expected:
            missing = sorted(expected - given)
            extra = sorted(given - expected)
            raise ParameterError(f"{self.kind.value} takes exactly {list(KIND_PARAMS[self.kind])}; "
                                 f"missing {missing}, unexpected {extra}")
        values = {}
        for key, value in self.params.items():
            try:
                values[key] = float(value)
            except (TypeError, ValueError):
                raise ParameterError(f"Parameter '{key}' must be a number, got {value!r}")
            if math.isnan(values[key]):
                raise ParameterError(f"Parameter '{key}' is NaN")
        object.__setattr__(self, "params", {key: values[key] for key in KIND_PARAMS[self.kind]})
        if self.char_rate < 0:
            raise ParameterError(f"Character rate must be nonnegative, got {self.char_rate}")

    def __getattr__(self, item: str) -> float:
        params = self.__dict__.get("params")
        if params is not None and item in params:
            return params[item]
        raise AttributeError(f"{type(self).__name__} of kind "
                             f"{self.__dict__.get('kind')} has no attribute '{item}'")

    @property
    def dim(self) -> float:
        return self.space.local_dim

    @property
    def label(self) -> str:
        if self.name:
            return self.name
        args = ",".join(f"{k}={v:g}" for k, v in self.params.items())
        return f"{self.kind.value}({args})"

    def with_params(self, **updates: float) -> "InequalitySpec":
        params = dict(self.params)
        params.update(updates)
        return InequalitySpec(self.kind, params, self.space, self.char_rate, self.name)

    # --- derived exponents ---

    @property
    def lebesgue_p(self) -> float:
        """The exponent of the Sobolev side."""
        return self.params["p1"] if self.kind == InequalityKind.CRITICAL_CKN else self.params["p"]

    @property
    def p_conj(self) -> float:
        return conjugate(self.lebesgue_p)

    @property
    def q_tilde(self) -> Optional[float]:
        if self.kind in (InequalityKind.CKN, InequalityKind.GN):
            return interpolated_exponent(self.q, self.r, self.theta)
        if self.kind == InequalityKind.CRITICAL_CKN:
            return interpolated_exponent(self.q1, self.r1, self.theta)
        return None

    @property
    def target_q(self) -> Optional[float]:
        """The exponent of the weighted Lebesgue side, where one exists."""
        if self.kind == InequalityKind.HARDY:
            return self.p
        if self.kind in (InequalityKind.CKN, InequalityKind.GN, InequalityKind.CRITICAL_CKN):
            return self.q_tilde
        if self.kind == InequalityKind.HLS:
            return (self.p + self.q) / self.q
        return self.params.get("q")

    @property
    def q_conj(self) -> Optional[float]:
        q = self.target_q
        return None if q is None else conjugate(q)

    @property
    def gamma(self) -> Optional[float]:
        """g with 1/g = 1/q - 1/p, defined only when the target exponent is below p."""
        q = self.target_q
        if q is None or not q < self.lebesgue_p:
            return None
        return 1.0 / (1.0 / q - 1.0 / self.lebesgue_p)

    def derived(self) -> Dict[str, float]:
        out = {"d": self.dim, "p_conj": self.p_conj}
        for key in ("q_conj", "q_tilde", "gamma"):
            value = getattr(self, key)
            if value is not None:
                out[key] = value
        if self.kind in (InequalityKind.CRITICAL_HARDY, InequalityKind.UNCERTAINTY_CRITICAL):
            out["q_limit"] = (self.r - 1.0) * self.p_conj
        if self.kind == InequalityKind.CRITICAL_CKN:
            out["q_limit"] = (self.r - 1.0) * self.p_conj
        return out

    def describe(self) -> Dict[str, Any]:
        return {
            "name": self.label,
            "kind": self.kind.value,
            "params": dict(self.params),
            "space": self.space.describe(),
            "char_rate": self.char_rate,
        }
