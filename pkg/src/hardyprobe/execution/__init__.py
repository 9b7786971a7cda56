"""Parallel execution of independent problems."""
from .parallel import ProblemPool

__all__ = ["ProblemPool"]
