# src/hardyprobe/errors.py

import json
import logging
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional

logger = logging.getLogger(__name__)


class HardyProbeError(Exception):
    """Base class for every error raised by hardyprobe."""
    pass


class QuadratureError(HardyProbeError):
    """Raised when a one-dimensional integral cannot be computed."""
    pass


class NonPositiveIntegrand(QuadratureError):
    """Raised when a sampled integrand value is negative."""
    def __init__(self, r: float, value: float):
        self.r = r
        self.value = value
        super().__init__(f"Integrand is negative at r={r!r}: {value!r}")


class NoConvergence(QuadratureError):
    """Raised when the tolerance is unmet at the evaluation budget."""
    def __init__(self, message, **kwargs):
        super().__init__(message)
        for key, value in kwargs.items():
            setattr(self, key, value)


class EvaluationFailure(QuadratureError):
    """Raised when a user function fails or returns a non-finite value."""
    pass


class DivergentIntegralError(QuadratureError):
    """Raised where a divergent integral is an error rather than a verdict."""
    def __init__(self, end: str):
        self.end = end
        super().__init__(f"Integral diverges at {end}")


class AdmissibilityError(HardyProbeError):
    """Raised when a problem's exponents do not fit the requested constant."""
    pass


class ParameterError(HardyProbeError):
    """Raised when a kernel or space parameter is out of range."""
    pass


class ExponentError(HardyProbeError):
    """Raised when exponents violate a required scaling relation."""
    pass


class GridError(HardyProbeError):
    """Raised when a grid cannot resolve a kernel singularity."""
    pass


class ZeroDenominator(HardyProbeError):
    """Raised when a ratio is requested for a test function of zero norm."""
    pass


class ConfigError(HardyProbeError):
    """Raised when an experiment config cannot be parsed or validated."""
    def __init__(self, message: str, line: Optional[int] = None, column: Optional[int] = None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f" (line {line}, column {column})"
        super().__init__(f"{message}{where}")


class WeightParseError(ConfigError):
    """Raised when a weight string is malformed."""
    pass


class FailureLog:
    """Collects problems that failed during a batch run and saves them as JSON."""

    def __init__(self, command: str, out_dir: Path = Path("./out")):
        self.command = command
        self.out_dir = out_dir
        self.failures: List[Dict[str, Any]] = []

    def add_failure(self, problem_name: str, error: Exception, index: Optional[int] = None):
        """Adds a failed problem."""
        entry = {
            "index": index,
            "problem": problem_name,
            "error_type": type(error).__name__,
            "error_message": str(error),
            "timestamp": datetime.now(timezone.utc).isoformat(),
        }
        self.failures.append(entry)
        logger.debug(f"Problem {problem_name} failed: {type(error).__name__}: {error}")

    def save(self) -> Optional[Path]:
        """Saves all failures to failures.json; returns None when there is nothing to save."""
        if not self.failures:
            return None

        self.out_dir.mkdir(parents=True, exist_ok=True)
        failure_file = self.out_dir / "failures.json"
        summary = {
            "command": self.command,
            "total_failures": len(self.failures),
            "failures": self.failures,
        }
        try:
            with open(failure_file, "w", encoding="utf-8") as f:
                json.dump(summary, f, indent=2, ensure_ascii=False, default=str)
            logger.info(f"Failure log saved to: {failure_file}")
            return failure_file
        except OSError as e:
            logger.error(f"Failed to save failure log to {failure_file}: {e}", exc_info=True)
            return None

    def has_failures(self) -> bool:
        return bool(self.failures)

    def failure_count(self) -> int:
        return len(self.failures)
