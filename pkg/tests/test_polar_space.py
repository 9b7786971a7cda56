# tests/test_polar_space.py
import math

import numpy as np
import pytest

from hardyprobe.asymptotics import End, Growth
from hardyprobe.errors import ParameterError
from hardyprobe.polar_space import CharacterSurrogate, DensityKind, PolarSpace, sphere_area
from hardyprobe.quadrature import Integrand, integrate


def test_sphere_areas():
    assert sphere_area(1) == pytest.approx(2.0)
    assert sphere_area(2) == pytest.approx(2.0 * math.pi)
    assert sphere_area(3) == pytest.approx(4.0 * math.pi)


def test_half_line_is_plain_lebesgue():
    space = PolarSpace.half_line()
    assert space.sphere_constant == 1.0
    assert space.density(np.array([0.5, 3.0])) == pytest.approx([1.0, 1.0])
    assert space.volume(2.5) == pytest.approx(2.5)
    assert space.name == "half-line"


def test_euclidean_volume():
    space = PolarSpace.euclidean(3)
    assert space.volume(2.0) == pytest.approx(4.0 * math.pi * 8.0 / 3.0)
    assert space.density_growth(End.ZERO) == Growth(power=2.0)
    assert space.global_rate == 0.0


@pytest.mark.parametrize("n", [2, 3])
def test_hyperbolic_closed_forms_match_quadrature(n):
    space = PolarSpace.hyperbolic(n)
    density = Integrand(eval=space.density, singularity_hint_zero=space.density_growth(End.ZERO))
    numeric = integrate(density, 0.0, 1.7).value
    assert space.volume(1.7) == pytest.approx(numeric, rel=1e-8)


def test_hyperbolic_volume_by_quadrature():
    space = PolarSpace.hyperbolic(4)
    c = math.cosh(1.5)
    expected = 2.0 * math.pi ** 2 * (c ** 3 / 3.0 - c + 2.0 / 3.0)
    assert space.volume(1.5) == pytest.approx(expected, rel=1e-8)


def test_hyperbolic_density_has_no_overflow():
    space = PolarSpace.hyperbolic(3)
    value = float(space.log_density(1000.0))
    assert value == pytest.approx(math.log(4.0 * math.pi) + 2.0 * (1000.0 - math.log(2.0)))
    assert space.global_rate == 2.0
    assert space.density_growth(End.INFINITY) == Growth(rate=2.0)


def test_density_excess_strips_the_exponential_growth():
    hyperbolic = PolarSpace.hyperbolic(3)
    assert float(hyperbolic.log_density_excess(1e200)) == pytest.approx(math.log(4.0 * math.pi) - 2.0 * math.log(2.0))
    r = 0.3
    assert float(hyperbolic.log_density_excess(r)) == pytest.approx(math.log(4.0 * math.pi * math.sinh(r) ** 2) - 2.0 * r)
    local_global = PolarSpace.local_global(2, 1.5, sigma=1.0)
    assert float(local_global.log_density_excess(50.0)) == pytest.approx(-1.5)


def test_local_global_volume_is_continuous_at_one():
    space = PolarSpace.local_global(2, 1.5)
    assert space.kind == DensityKind.LOCAL_GLOBAL
    assert space.breakpoints() == (1.0,)
    below = space.volume(1.0)
    assert space.volume(1.0 + 1e-9) == pytest.approx(below, rel=1e-6)
    assert space.volume(3.0) == pytest.approx(0.5 + math.expm1(3.0) / 1.5)


def test_local_global_without_growth_is_linear():
    space = PolarSpace.local_global(3, 0.0)
    assert space.volume(4.0) == pytest.approx(1.0 / 3.0 + 3.0)


@pytest.mark.parametrize("factory", [
    lambda: PolarSpace.hyperbolic(1),
    lambda: PolarSpace.euclidean(0),
    lambda: PolarSpace.local_global(2, -1.0),
    lambda: PolarSpace.euclidean(2, sigma=0.0),
])
def test_invalid_spaces(factory):
    with pytest.raises(ParameterError):
        factory()


def test_negative_radius_rejected():
    with pytest.raises(ParameterError):
        PolarSpace.euclidean(2).log_density(np.array([-1.0, 1.0]))


def test_character_surrogate():
    surrogate = CharacterSurrogate(rate=2.0, exponent=0.5)
    assert surrogate.factor(1.0) == pytest.approx(math.e)
    assert surrogate.as_weight().exprate == 1.0
