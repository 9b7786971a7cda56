# tests/conftest.py
import pytest
from click.testing import CliRunner

from hardyprobe.hardy_core import Direction, HardyProblem
from hardyprobe.polar_space import PolarSpace
from hardyprobe.weights import ONE, WeightExpr


@pytest.fixture
def cli_runner():
    """Provide a reusable CLI test runner for hardyprobe."""
    return CliRunner()


@pytest.fixture
def classical_problem() -> HardyProblem:
    """Half-line Hardy inequality: p = q = 2, Phi = r^-2, Psi = 1. B1 = 1."""
    return HardyProblem(PolarSpace.half_line(), 2.0, 2.0, Direction.INNER,
                        WeightExpr(power=-2.0), ONE, name="classical")


@pytest.fixture
def exponential_outer_problem() -> HardyProblem:
    """p = q = 2 outer problem with Phi = 1, Psi_d = exp(-r). B2 = exp(-1/2) at R = 1."""
    return HardyProblem.with_dual(PolarSpace.half_line(), 2.0, 2.0, Direction.OUTER,
                                  ONE, WeightExpr(exprate=-1.0), name="exponential_b2")


@pytest.fixture
def exponential_b3_problem() -> HardyProblem:
    """q < p inner problem with Phi = Psi_d = exp(-r). B3 = 1/30."""
    return HardyProblem.with_dual(PolarSpace.half_line(), 4.0, 2.0, Direction.INNER,
                                  WeightExpr(exprate=-1.0), WeightExpr(exprate=-1.0), name="exponential_b3")
