# tests/test_asymptotics.py
import pytest

from hardyprobe.asymptotics import (
    CONSTANT,
    End,
    Growth,
    ball_integral,
    complement_integral,
    converges_at,
    integrate_at_infinity,
    integrate_at_zero,
)


def test_growth_arithmetic():
    g = Growth(rate=1.0, power=-2.0, log=0.5)
    assert g + Growth(power=1.0) == Growth(rate=1.0, power=-1.0, log=0.5)
    assert 2 * g == Growth(rate=2.0, power=-4.0, log=1.0)
    assert g * 0.5 == Growth(rate=0.5, power=-1.0, log=0.25)


def test_unbounded_and_vanishing():
    assert Growth(power=-1.0).is_unbounded(End.ZERO)
    assert Growth(power=-1.0).is_vanishing(End.INFINITY)
    # the exponential factor is constant at zero
    assert not Growth(rate=5.0).is_unbounded(End.ZERO)
    assert Growth(rate=-1.0, power=10.0).is_vanishing(End.INFINITY)
    assert Growth(log=1.0).is_unbounded(End.ZERO)
    assert not CONSTANT.is_unbounded(End.ZERO)
    assert not CONSTANT.is_vanishing(End.INFINITY)


def test_integrate_at_zero_power_classes():
    assert integrate_at_zero(Growth(power=-0.5)) == Growth(power=0.5)
    assert integrate_at_zero(Growth(power=-1.0)) is None
    assert integrate_at_zero(Growth(power=-1.5)) is None


def test_integrate_at_zero_log_borderline():
    # int_0^R dr / (r log(1/r)^2) ~ log(1/R)^-1
    assert integrate_at_zero(Growth(power=-1.0, log=-2.0)) == Growth(log=-1.0)
    assert integrate_at_zero(Growth(power=-1.0, log=-1.0)) is None
    assert integrate_at_zero(Growth(power=-1.0, log=-1.0, loglog=-2.0)) == Growth(loglog=-1.0)


def test_integrate_at_infinity():
    assert integrate_at_infinity(Growth(rate=-1.0, power=3.0)) == Growth(rate=-1.0, power=3.0)
    assert integrate_at_infinity(Growth(power=-2.0)) == Growth(power=-1.0)
    assert integrate_at_infinity(Growth(power=-1.0)) is None
    assert integrate_at_infinity(Growth(rate=0.5, power=-5.0)) is None


def test_ball_and_complement_integrals():
    # int_0^R r^0 dr ~ R, int_R^inf r^-2 dr ~ 1/R
    assert ball_integral(Growth(), End.INFINITY) == Growth(power=1.0)
    assert complement_integral(Growth(power=-2.0), End.ZERO) == Growth(power=-1.0)
    # integrable tails contribute constants
    assert complement_integral(Growth(power=-0.5), End.ZERO) == CONSTANT
    assert ball_integral(Growth(power=-1.5), End.ZERO) is None


@pytest.mark.parametrize("g,end,expected", [
    (Growth(power=-0.99), End.ZERO, True),
    (Growth(power=-1.0), End.ZERO, False),
    (Growth(power=-1.01), End.INFINITY, True),
    (Growth(power=-1.0, log=-1.5), End.INFINITY, True),
    (Growth(rate=1e-3, power=-10.0), End.INFINITY, False),
])
def test_converges_at(g, end, expected):
    assert converges_at(g, end) is expected
