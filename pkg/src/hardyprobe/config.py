# src/hardyprobe/config.py

import os
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError, HardyProbeError, WeightParseError
from .hardy_core import Direction, HardyProblem, Which
from .inequalities.checks import CheckMode
from .inequalities.grid import DEFAULT_HALF_WIDTH, UniformGrid
from .inequalities.specs import KIND_PARAMS, InequalityKind, InequalitySpec
from .kernels import KernelBound, KernelVariant
from .polar_space import PolarSpace
from .weights import weight_from_config

WeightConfig = Union[str, float, Dict[str, Any]]

SPACE_KINDS = ("euclidean", "half_line", "homogeneous", "hyperbolic", "local_global")
INPUT_KINDS = ("unit_bump", "random_bumps", "zero", "concentrating")
FAMILY_KINDS = ("standard", "fk")
OUTPUT_FORMATS = ("json", "csv", "plot")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class SpaceConfig(_Strict):
    """A polar space: ``dim`` is d, Q or n depending on ``kind``."""
    name: str
    kind: str = "euclidean"
    dim: float = 1.0
    kappa: float = 0.0
    sigma: Optional[float] = None

    @field_validator("kind")
    @classmethod
    def kind_valid(cls, v: str) -> str:
        if v not in SPACE_KINDS:
            raise ValueError(f"Invalid space kind '{v}'. Must be one of {list(SPACE_KINDS)}.")
        return v

    def to_space(self) -> PolarSpace:
        try:
            if self.kind == "half_line":
                space = PolarSpace.half_line()
            elif self.kind == "euclidean":
                space = PolarSpace.euclidean(self.dim, self.sigma)
            elif self.kind == "homogeneous":
                space = PolarSpace.homogeneous(self.dim, self.sigma)
            elif self.kind == "hyperbolic":
                space = PolarSpace.hyperbolic(self.dim, self.sigma)
            else:
                space = PolarSpace.local_global(self.dim, self.kappa, self.sigma)
        except HardyProbeError as e:
            raise ConfigError(f"Space '{self.name}': {e}")
        return space


class KernelConfig(_Strict):
    variant: KernelVariant
    alpha: float
    dim: Optional[float] = None
    normalization: float = 1.0
    c_prime: Optional[float] = None
    char_rate: float = 0.0
    growth_rate: float = 0.0
    diameter: Optional[float] = None
    c: float = 1.0

    def to_kernel(self, dim: float) -> KernelBound:
        data = self.model_dump(exclude_none=True)
        data["dim"] = self.dim if self.dim is not None else dim
        try:
            return KernelBound(**data)
        except HardyProbeError as e:
            raise ConfigError(f"Kernel: {e}")


class FamilyConfig(_Strict):
    """Test functions for sandwich and only-if checks."""
    kinds: List[str] = Field(default_factory=lambda: ["standard"])
    seed: Optional[int] = None
    random_count: int = 4
    epsilon: float = 0.05
    k_min: int = 1
    k_max: int = 20

    @field_validator("kinds")
    @classmethod
    def kinds_valid(cls, v: List[str]) -> List[str]:
        for kind in v:
            if kind not in FAMILY_KINDS:
                raise ValueError(f"Invalid family '{kind}'. Must be one of {list(FAMILY_KINDS)}.")
        return v


class HardyProblemConfig(_Strict):
    name: str
    space: Union[str, SpaceConfig] = "R1"
    p: float
    q: float
    direction: Direction = Direction.INNER
    phi: WeightConfig
    psi: Optional[WeightConfig] = None
    psi_dual: Optional[WeightConfig] = None
    which: Optional[Which] = None
    family: FamilyConfig = Field(default_factory=FamilyConfig)
    expect_divergent: bool = False

    @field_validator("phi", "psi", "psi_dual")
    @classmethod
    def weight_parses(cls, v):
        if v is not None:
            try:
                weight_from_config(v)
            except WeightParseError as e:
                raise ValueError(str(e))
        return v

    @model_validator(mode="after")
    def one_psi(self):
        if (self.psi is None) == (self.psi_dual is None):
            raise ValueError("Give exactly one of 'psi' and 'psi_dual'")
        return self


class GridConfig(_Strict):
    half_width: float = DEFAULT_HALF_WIDTH
    points: Optional[int] = None

    def to_grid(self, dim: int) -> UniformGrid:
        try:
            return UniformGrid(dim, self.half_width, self.points)
        except HardyProbeError as e:
            raise ConfigError(f"Grid: {e}")


class InequalityConfig(_Strict):
    name: str
    kind: InequalityKind
    params: Dict[str, float]
    space: Union[str, SpaceConfig] = "R1"
    char_rate: float = 0.0
    kernel: Optional[KernelConfig] = None
    mode: CheckMode = CheckMode.REFINE
    levels: int = 4
    zoom: float = 16.0
    grid: Optional[GridConfig] = None
    inputs: List[str] = Field(default_factory=lambda: ["unit_bump", "random_bumps"])
    region: bool = False

    @field_validator("inputs")
    @classmethod
    def inputs_valid(cls, v: List[str]) -> List[str]:
        for kind in v:
            if kind not in INPUT_KINDS:
                raise ValueError(f"Invalid input '{kind}'. Must be one of {list(INPUT_KINDS)}.")
        return v

    @model_validator(mode="after")
    def params_match_kind(self):
        expected = set(KIND_PARAMS[self.kind])
        if set(self.params) != expected:
            raise ValueError(f"{self.kind.value} takes exactly {list(KIND_PARAMS[self.kind])}, "
                             f"got {sorted(self.params)}")
        return self


class Tolerances(_Strict):
    quad_tol: float = 1e-9
    ratio_slack: float = 1e-6
    lower_slack: float = 1e-4
    stability_band: float = 0.10

    @field_validator("quad_tol")
    @classmethod
    def tol_positive(cls, v: float) -> float:
        if not v > 0:
            raise ValueError("quad_tol must be positive")
        return v


class OutputConfig(_Strict):
    dir: str = "hardyprobe_out"
    formats: List[str] = Field(default_factory=lambda: list(OUTPUT_FORMATS))

    @field_validator("formats")
    @classmethod
    def formats_valid(cls, v: List[str]) -> List[str]:
        for fmt in v:
            if fmt not in OUTPUT_FORMATS:
                raise ValueError(f"Invalid format '{fmt}'. Must be one of {list(OUTPUT_FORMATS)}.")
        return v


class SweepConfig(_Strict):
    """``axis`` is ``<problem or inequality name>.<field>``; inequality parameters are fields."""
    axis: str
    start: float
    stop: float
    count: int = 11

    @field_validator("count")
    @classmethod
    def count_nonnegative(cls, v: int) -> int:
        if v < 0:
            raise ValueError("count must be nonnegative")
        return v


class SuiteConfig(_Strict):
    """Seeded admissible problems spread over the standard spaces."""
    count: int = 20
    seed: Optional[int] = None

    @field_validator("count")
    @classmethod
    def count_positive(cls, v: int) -> int:
        if v < 1:
            raise ValueError("count must be positive")
        return v


class ExperimentConfig(_Strict):
    version: int = 1
    seed: int = 0
    spaces: List[SpaceConfig] = Field(default_factory=list)
    problems: List[HardyProblemConfig] = Field(default_factory=list)
    suite: Optional[SuiteConfig] = None
    inequalities: List[InequalityConfig] = Field(default_factory=list)
    tolerances: Tolerances = Field(default_factory=Tolerances)
    outputs: OutputConfig = Field(default_factory=OutputConfig)
    sweep: Optional[SweepConfig] = None

    @model_validator(mode="after")
    def names_resolve(self):
        space_names = [s.name for s in self.spaces]
        if len(set(space_names)) != len(space_names):
            raise ValueError("Space names must be unique")
        known = set(space_names) | {"R1"}
        for entry in [*self.problems, *self.inequalities]:
            if isinstance(entry.space, str) and entry.space not in known:
                raise ValueError(f"'{entry.name}' refers to unknown space '{entry.space}'")
        names = [e.name for e in [*self.problems, *self.inequalities]]
        if len(set(names)) != len(names):
            raise ValueError("Problem and inequality names must be unique")
        return self

    def space(self, ref: Union[str, SpaceConfig]) -> PolarSpace:
        if isinstance(ref, SpaceConfig):
            return ref.to_space()
        for s in self.spaces:
            if s.name == ref:
                return s.to_space()
        return PolarSpace.euclidean(1)

    def build_problem(self, cfg: HardyProblemConfig) -> HardyProblem:
        space = self.space(cfg.space)
        try:
            phi = weight_from_config(cfg.phi)
            if cfg.psi_dual is not None:
                return HardyProblem.with_dual(space, cfg.p, cfg.q, cfg.direction, phi,
                                              weight_from_config(cfg.psi_dual), name=cfg.name)
            return HardyProblem(space, cfg.p, cfg.q, cfg.direction, phi, weight_from_config(cfg.psi), name=cfg.name)
        except HardyProbeError as e:
            raise ConfigError(f"Problem '{cfg.name}': {e}")

    def build_spec(self, cfg: InequalityConfig) -> InequalitySpec:
        try:
            return InequalitySpec(cfg.kind, dict(cfg.params), self.space(cfg.space), cfg.char_rate, cfg.name)
        except HardyProbeError as e:
            raise ConfigError(f"Inequality '{cfg.name}': {e}")

    def build_kernel(self, cfg: InequalityConfig) -> Optional[KernelBound]:
        if cfg.kernel is None:
            return None
        return cfg.kernel.to_kernel(self.space(cfg.space).local_dim)

    def entry(self, name: str) -> Union[HardyProblemConfig, InequalityConfig]:
        for e in [*self.problems, *self.inequalities]:
            if e.name == name:
                return e
        raise ConfigError(f"No problem or inequality named '{name}'")


# --- loading ------------------------------------------------------------------------------


def _locate(node: Optional[yaml.Node], loc: Tuple[Any, ...]) -> Tuple[Optional[int], Optional[int]]:
    """1-based line/column of the deepest YAML node along a pydantic error location."""
    best = node
    for key in loc:
        if isinstance(node, yaml.MappingNode):
            match = next((v for k, v in node.value if k.value == str(key)), None)
        elif isinstance(node, yaml.SequenceNode) and isinstance(key, int) and key < len(node.value):
            match = node.value[key]
        else:
            match = None
        if match is None:
            break
        node = best = match
    if best is None:
        return None, None
    return best.start_mark.line + 1, best.start_mark.column + 1


def parse_config(text: str) -> ExperimentConfig:
    """Parses YAML text into an ExperimentConfig; every failure is a ConfigError."""
    expanded = os.path.expandvars(text)
    try:
        data = yaml.safe_load(expanded)
        root = yaml.compose(expanded, Loader=yaml.SafeLoader)
    except yaml.MarkedYAMLError as e:
        mark = e.problem_mark
        line, column = (mark.line + 1, mark.column + 1) if mark is not None else (None, None)
        raise ConfigError(f"Invalid YAML: {e.problem}", line, column)
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ConfigError("Config root must be a mapping", 1, 1)
    try:
        return ExperimentConfig(**data)
    except ValidationError as e:
        first = e.errors()[0]
        line, column = _locate(root, tuple(first["loc"]))
        where = ".".join(str(part) for part in first["loc"])
        raise ConfigError(f"{where}: {first['msg']}", line, column)


def load_config(filepath: Union[str, Path]) -> ExperimentConfig:
    """Load and validate an experiment config from a YAML file."""
    from dotenv import load_dotenv

    # Load .env from current directory
    env_path = Path(".env")
    if env_path.exists():
        load_dotenv(env_path)

    path = Path(filepath)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    return parse_config(path.read_text(encoding="utf-8"))


def dump_config(config: ExperimentConfig) -> str:
    """Serializes a config back to YAML; parse_config(dump_config(c)) == c."""
    data = config.model_dump(mode="json", exclude_none=True)
    return yaml.safe_dump(data, sort_keys=False, allow_unicode=True)
