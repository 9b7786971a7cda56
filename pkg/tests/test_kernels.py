# tests/test_kernels.py
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hardyprobe.errors import ExponentError, ParameterError
from hardyprobe.kernels import (
    KernelBound,
    KernelVariant,
    bessel_closed_form,
    check_monotone,
    eval_bessel_euclidean,
    fit_domination_constant,
    kernel_from_config,
    riesz_constant,
    tail_integrability,
    young_check,
)
from hardyprobe.polar_space import PolarSpace

RADII = np.geomspace(0.05, 20.0, 20)


def yukawa(r):
    return math.exp(-r) / (4.0 * math.pi * r)


# --- exact Euclidean kernel ---

@pytest.mark.parametrize("r", RADII)
def test_subordination_integral_matches_yukawa(r):
    assert eval_bessel_euclidean(2.0, 3, 1.0, float(r)) == pytest.approx(yukawa(r), rel=1e-6)


def test_closed_form_matches_yukawa():
    expected = [yukawa(r) for r in RADII]
    np.testing.assert_allclose(bessel_closed_form(2.0, 3, 1.0, RADII), expected, rtol=1e-10)


def test_closed_form_agrees_with_quadrature_off_the_yukawa_case():
    for r in (0.3, 2.0, 7.0):
        exact = bessel_closed_form(1.3, 2, 0.5, r)
        assert eval_bessel_euclidean(1.3, 2, 0.5, r) == pytest.approx(exact, rel=1e-6)


def test_riesz_kernel_dominates():
    values = [yukawa(r) for r in RADII]
    constant = fit_domination_constant(RADII, values, 2.0, 3.0)
    assert riesz_constant(2.0, 3.0) == pytest.approx(1.0 / (4.0 * math.pi))
    assert constant <= riesz_constant(2.0, 3.0)


def test_bessel_arguments_are_checked():
    with pytest.raises(ParameterError):
        eval_bessel_euclidean(2.0, 3, 1.0, 0.0)
    with pytest.raises(ParameterError):
        riesz_constant(3.0, 3.0)


# --- piecewise majorants ---

@pytest.mark.parametrize("kb", [
    KernelBound.noncompact(0.5, 1),
    KernelBound.noncompact(1.5, 3, char_rate=1.0, growth_rate=0.5),
    KernelBound.compact(0.5, 1),
    KernelBound.euclidean_bessel(2.0, 3),
], ids=["noncompact", "noncompact-rates", "compact", "euclidean"])
def test_majorants_are_monotone(kb):
    assert check_monotone(kb, np.geomspace(1e-3, 10.0, 200))


def test_log_branch_at_alpha_equal_d_is_not_monotone():
    kb = KernelBound.noncompact(1.0, 1)
    assert kb.eval(math.exp(-2.0)) == pytest.approx(2.0)
    assert not check_monotone(kb, np.geomspace(1e-3, 10.0, 200))


def test_log_branch_stays_below_one():
    kb = KernelBound.noncompact(1.0, 1)
    radii = np.geomspace(1e-3, 1e3, 400)
    assert np.all(kb.eval(radii) >= 0.0)
    beyond = radii[radii >= 1.0]
    np.testing.assert_allclose(kb.eval(beyond), np.exp(kb.far_rate * beyond))


def test_default_decay_rate():
    assert KernelBound.noncompact(0.5, 1).decay == 1.0
    kb = KernelBound.noncompact(1.5, 3, char_rate=1.0, growth_rate=0.5)
    assert kb.decay == 4.0
    assert kb.far_rate == -3.5
    assert KernelBound.noncompact(0.5, 1, c_prime=2.5).decay == 2.5


def test_compact_bound_vanishes_beyond_the_diameter():
    kb = KernelBound.compact(0.5, 1, diameter=2.0)
    np.testing.assert_allclose(kb.eval(np.array([0.25, 2.0, 2.5])), [2.0, 2.0 ** -0.5, 0.0])


def test_weight_form_of_the_noncompact_bound():
    kb = KernelBound.noncompact(0.5, 1)
    w = kb.as_weight(dilation=2.0)
    assert w.eval(1.0) == pytest.approx(kb.eval(0.5))
    assert w.eval(4.0) == pytest.approx(kb.eval(2.0))
    with pytest.raises(ParameterError):
        KernelBound.compact(0.5, 1).as_weight()


@pytest.mark.parametrize("factory", [
    lambda: KernelBound.noncompact(2.0, 1),
    lambda: KernelBound.compact(1.0, 1),
    lambda: KernelBound.euclidean_bessel(2.0, 2.5),
    lambda: KernelBound.noncompact(0.0, 1),
    lambda: KernelBound.noncompact(0.5, 1, c_prime=-1.0),
    lambda: KernelBound.noncompact(0.5, 1, char_rate=-1.0),
])
def test_invalid_kernels(factory):
    with pytest.raises(ParameterError):
        factory()


def test_majorant_needs_positive_radii():
    with pytest.raises(ParameterError):
        KernelBound.noncompact(0.5, 1).eval(np.array([0.0, 1.0]))


def test_kernel_from_config():
    kb = kernel_from_config({"variant": "compact", "alpha": 0.5}, dim=1)
    assert kb.variant == KernelVariant.COMPACT
    assert kb.describe() == {"variant": "compact", "alpha": 0.5, "dim": 1, "normalization": 1.0,
                             "diameter": math.pi}
    with pytest.raises(ParameterError):
        kernel_from_config({"variant": "compact", "alpha": 0.5})


# --- tail integrability ---

def test_tail_integrability_against_hyperbolic_growth():
    space = PolarSpace.hyperbolic(3)
    borderline = tail_integrability(1.0, 1.0, 3.0, 1.0, space, rate_delta=0.5, rate_chi=0.5)
    assert not borderline.converges
    assert borderline.exponent_gap == pytest.approx(0.0)

    decaying = tail_integrability(1.0, 1.0, 3.5, 1.0, space, rate_delta=0.5, rate_chi=0.5)
    assert decaying.converges
    assert decaying.exponent_gap == pytest.approx(0.5)
    tail = decaying.shell_log_terms[-4:]
    assert all(later < earlier for earlier, later in zip(tail, tail[1:]))


def test_tail_integrability_uses_absolute_exponents():
    space = PolarSpace.euclidean(3)
    plus = tail_integrability(2.0, 0.0, 1.0, 1.0, space, rate_delta=0.4)
    minus = tail_integrability(-2.0, 0.0, 1.0, 1.0, space, rate_delta=0.4)
    assert plus.exponent_gap == pytest.approx(0.2)
    assert minus.exponent_gap == pytest.approx(0.2)


def test_tail_integrability_arguments():
    with pytest.raises(ParameterError):
        tail_integrability(0.0, 0.0, 0.0, 1.0, PolarSpace.euclidean(2))
    with pytest.raises(ParameterError):
        tail_integrability(0.0, 0.0, 1.0, -1.0, PolarSpace.euclidean(2))


# --- Young's inequality ---

entries = st.one_of(st.just(0.0), st.floats(min_value=1e-3, max_value=10.0))
sequences = st.lists(entries, min_size=1, max_size=20)


@settings(max_examples=200, deadline=None)
@given(f=sequences, g=sequences,
       p=st.floats(min_value=1.1, max_value=4.0),
       extra=st.floats(min_value=0.0, max_value=3.0))
def test_young_inequality_holds(f, g, p, extra):
    q = p + extra
    r = 1.0 / (1.0 + 1.0 / q - 1.0 / p)
    result = young_check(f, g, p, q, r)
    assert result.passed
    assert result.to_record()["pass"] is True


def test_young_exponent_relation_is_enforced():
    with pytest.raises(ExponentError):
        young_check([1.0], [1.0], 2.0, 2.0, 2.0)
    with pytest.raises(ExponentError):
        young_check([1.0], [1.0], 3.0, 2.0, 1.0)


def test_young_sequences_are_checked():
    with pytest.raises(ParameterError):
        young_check([], [1.0], 2.0, 2.0, 1.0)
    with pytest.raises(ParameterError):
        young_check([1.0, -1.0], [1.0], 2.0, 2.0, 1.0)


def test_young_with_delta_sequence_is_sharp():
    result = young_check([1.0, 2.0, 3.0], [1.0], 2.0, 2.0, 1.0)
    assert result.lhs == pytest.approx(result.rhs)
