"""Bundled experiment configs and their metadata."""
import re
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from ..config import ExperimentConfig, parse_config

DEFINITIONS_DIR = Path(__file__).resolve().parent / "definitions"

CATEGORIES: Dict[str, str] = {
    "constants": "CHARACTERIZING CONSTANTS",
    "inequalities": "SOBOLEV-TYPE INEQUALITIES",
    "suites": "PROPERTY SUITES",
}

_SEED_LINE = re.compile(r"^seed:\s*-?\d+", re.MULTILINE)


@dataclass(frozen=True)
class Template:
    name: str
    description: str
    category: str
    command: str
    settings: Tuple[str, ...]
    capabilities: Tuple[str, ...]
    flags: str = ""

    @property
    def path(self) -> Path:
        return DEFINITIONS_DIR / f"{self.name}.yaml"

    def text(self, seed: Optional[int] = None) -> str:
        """The YAML definition; ``seed`` replaces the top-level seed and keeps the comments."""
        if not self.path.is_file():
            raise FileNotFoundError(f"YAML definition for template '{self.name}' not found at {self.path}")
        text = self.path.read_text(encoding="utf-8")
        if seed is not None:
            text = _SEED_LINE.sub(f"seed: {seed}", text, count=1)
        return text

    def config(self) -> ExperimentConfig:
        return parse_config(self.text())

    def run_line(self, config_file: str = "experiment.yml") -> str:
        return " ".join(filter(None, ["hardyprobe", self.command, "--config", config_file, self.flags]))


TEMPLATES: Dict[str, Template] = {t.name: t for t in (
    Template(
        "classical_hardy",
        "Half-line Hardy inequality and the exponential B2 pair",
        "constants", "bconst",
        settings=("problems[].p / problems[].q", "problems[].phi", "problems[].psi or problems[].psi_dual"),
        capabilities=("B1 = 1 with sandwich upper bound 2", "B2 = exp(-1/2) attained at R = 1",
                      "B(R) curves in plotdata/"),
    ),
    Template(
        "exponential_b3",
        "q < p constants: the exponential B3 pair and a divergent power pair",
        "constants", "bconst",
        settings=("problems[].p (greater than q)", "problems[].phi", "problems[].psi_dual"),
        capabilities=("B3 = 1/30 for phi = psi_dual = exp(-r), p = 4, q = 2",
                      "Divergence reported as a value, not an error"),
    ),
    Template(
        "critical_boundary",
        "Sweep q across the critical Hardy boundary (r - 1) p'",
        "inequalities", "sweep",
        settings=("inequalities[].params (p, q, r)", "sweep.axis", "sweep.start / sweep.stop / sweep.count"),
        capabilities=("B2 analog of the logarithmic weight at every sampled q",
                      "Verdict transition marked in report.csv"),
    ),
    Template(
        "hardy_sobolev_stability",
        "Convolution-form Hardy-Sobolev ratios under refinement and concentration",
        "inequalities", "check",
        settings=("inequalities[].params (p, q, alpha, beta)", "inequalities[].mode"),
        capabilities=("Bounded / Unbounded verdicts from dyadic refinements",
                      "Region decomposition of the weighted norm"),
        flags="--expect-unbounded",
    ),
    Template(
        "sandwich_suite",
        "Sandwich checks over seeded admissible problems",
        "suites", "check",
        settings=("suite.count", "seed"),
        capabilities=("Euclidean, hyperbolic and local/global spaces",
                      "Near-extremizer lower bound and (p')^(1/p') p^(1/q) upper bound"),
        flags="--jobs 4",
    ),
)}


def get_template(name: str) -> Template:
    try:
        return TEMPLATES[name]
    except KeyError as exc:
        raise KeyError(f"Template '{name}' not found") from exc


def load_template_yaml(name: str, seed: Optional[int] = None) -> str:
    return get_template(name).text(seed)


def by_category() -> List[Tuple[str, List[Template]]]:
    """(title, templates sorted by name) for every non-empty category, in display order."""
    grouped = []
    for key, title in CATEGORIES.items():
        members = sorted((t for t in TEMPLATES.values() if t.category == key), key=lambda t: t.name)
        if members:
            grouped.append((title, members))
    return grouped
