# tests/test_quadrature.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyprobe.asymptotics import End, Growth
from hardyprobe.errors import DivergentIntegralError, EvaluationFailure, NonPositiveIntegrand, ParameterError
from hardyprobe.quadrature import Divergent, Integrand, cumulative, integrate, log_node_grid, sup_search


# --- integrate ---

def test_exponential_on_half_line():
    result = integrate(lambda r: math.exp(-r))
    assert result.is_finite
    assert result.value == pytest.approx(1.0, rel=1e-8)
    assert result.evaluations > 0


def test_integrable_singularity_at_zero():
    f = Integrand(eval=lambda r: r ** -0.5, singularity_hint_zero=Growth(power=-0.5))
    assert integrate(f, 0.0, 1.0).value == pytest.approx(2.0, rel=1e-8)


def test_integrable_singularity_without_hint():
    assert integrate(lambda r: r ** -0.5, 0.0, 1.0).value == pytest.approx(2.0, rel=1e-7)


def test_power_tail_with_hint():
    f = Integrand(eval=lambda r: r ** -2.0, decay_hint_infinity=Growth(power=-2.0))
    assert integrate(f, 1.0).value == pytest.approx(1.0, rel=1e-8)


def test_hinted_divergence_at_zero():
    f = Integrand(eval=lambda r: 1.0 / r, singularity_hint_zero=Growth(power=-1.0))
    result = integrate(f, 0.0, 1.0)
    assert not result.is_finite
    assert result.value == Divergent(End.ZERO)


def test_unhinted_divergence_at_infinity():
    result = integrate(lambda r: 1.0 / r, 1.0)
    assert result.value == Divergent(End.INFINITY)
    assert str(result.value) == "divergent(infinity)"


def test_breakpoints_split_the_range():
    step = lambda r: 1.0 if r < 2.0 else 0.5
    assert integrate(step, 1.0, 3.0, breakpoints=(2.0,)).value == pytest.approx(1.5, rel=1e-10)


def test_negative_integrand_raises():
    with pytest.raises(NonPositiveIntegrand) as exc:
        integrate(lambda r: -1.0, 1.0, 2.0)
    assert exc.value.value == -1.0


def test_nan_integrand_raises():
    with pytest.raises(EvaluationFailure):
        integrate(lambda r: float("nan"), 1.0, 2.0)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(min_value=-0.9, max_value=3.0))
def test_power_on_the_unit_interval_is_exact(s):
    hinted = Integrand(eval=lambda r: r ** s, singularity_hint_zero=Growth(power=s))
    assert integrate(hinted, 0.0, 1.0).value == pytest.approx(1.0 / (s + 1.0), rel=1e-8)
    assert integrate(lambda r: r ** s, 0.0, 1.0).value == pytest.approx(1.0 / (s + 1.0), rel=1e-7)


@settings(max_examples=60, deadline=None)
@given(s=st.floats(min_value=-0.9, max_value=3.0),
       ends=st.tuples(st.floats(min_value=0.1, max_value=50.0), st.floats(min_value=0.1, max_value=50.0)))
def test_integral_grows_with_the_upper_limit(s, ends):
    b, c = sorted(ends)
    f = Integrand(eval=lambda r: r ** s * math.exp(-r), singularity_hint_zero=Growth(power=s))
    shorter = integrate(f, 0.0, b).value
    longer = integrate(f, 0.0, c).value
    assert shorter <= longer * (1.0 + 1e-9)


@pytest.mark.parametrize("a,b,tol", [(2.0, 1.0, 1e-9), (-1.0, 1.0, 1e-9), (0.0, 1.0, 0.0)])
def test_invalid_arguments(a, b, tol):
    with pytest.raises(ParameterError):
        integrate(lambda r: 1.0, a, b, tol)


# --- cumulative ---

def test_cumulative_matches_closed_form():
    grid = [0.5, 1.0, 2.0, 4.0]
    values = cumulative(lambda r: math.exp(-r), grid)
    np.testing.assert_allclose(values, 1.0 - np.exp(-np.array(grid)), rtol=1e-8)


def test_cumulative_divergent_head_raises():
    f = Integrand(eval=lambda r: r ** -2.0, singularity_hint_zero=Growth(power=-2.0))
    with pytest.raises(DivergentIntegralError):
        cumulative(f, [1.0, 2.0])


def test_cumulative_rejects_unsorted_grid():
    with pytest.raises(ParameterError):
        cumulative(lambda r: 1.0, [1.0, 0.5])


# --- sup_search ---

def test_sup_search_finds_interior_maximum():
    found = sup_search(lambda r: r * math.exp(-r), 1e-3, 1e3)
    assert found.is_finite
    assert found.sup == pytest.approx(math.exp(-1.0), rel=1e-9)
    assert found.argmax == pytest.approx(1.0, rel=1e-3)


def test_sup_search_reports_divergent_samples():
    found = sup_search(lambda r: Divergent(End.ZERO) if r < 1e-2 else 1.0, 1e-4, 1e2)
    assert not found.is_finite
    assert found.sup.end == End.ZERO


def test_sup_search_detects_blowup():
    found = sup_search(lambda r: r ** 3, 1e-2, 1e6)
    assert found.sup == Divergent(End.INFINITY)


def test_sup_search_linear_growth_diverges_at_both_ends():
    assert sup_search(lambda r: r, 1e-6, 1e6).sup == Divergent(End.INFINITY)
    assert sup_search(lambda r: 1.0 / r, 1e-6, 1e6).sup == Divergent(End.ZERO)


def test_sup_search_saturating_growth_stays_finite():
    found = sup_search(lambda r: r / (1.0 + r), 1e-6, 1e6)
    assert found.is_finite
    assert found.sup == pytest.approx(1.0, abs=1e-5)


# --- node grids ---

def test_node_grid_integral_and_running_integrals():
    grid = log_node_grid(1e-3, 10.0, cells=64, breakpoints=(2.0,))
    values = grid.nodes ** 2
    assert grid.integral(values) == pytest.approx((10.0 ** 3 - 1e-9) / 3.0, rel=1e-11)
    assert 2.0 in grid.edges

    forward = grid.forward(values)
    backward = grid.backward(values)
    expected_forward = (grid.nodes ** 3 - 1e-9) / 3.0
    np.testing.assert_allclose(forward, expected_forward, rtol=1e-8)
    np.testing.assert_allclose(forward + backward, grid.integral(values), rtol=1e-10)
