# tests/test_test_functions.py
import math

import numpy as np
import pytest

from hardyprobe.errors import ParameterError
from hardyprobe.hardy_core import HardyProblem, Verdict, compute_B, ratio, sandwich_check
from hardyprobe.polar_space import PolarSpace
from hardyprobe.test_functions import (
    FkExtremizer,
    NearExtremizer,
    PiecewiseRandom,
    PowerBump,
    Scaled,
    fk_family,
    seeded_problems,
    standard_family,
    suite_spaces,
)


def test_near_critical_exponent_sits_above_the_threshold(classical_problem):
    bump = PowerBump.near_critical(classical_problem, 0.01)
    assert bump.exponent == pytest.approx(-0.5 + 0.01)

    in_r3 = HardyProblem(PolarSpace.euclidean(3), 2.0, 2.0, classical_problem.direction,
                         classical_problem.phi, classical_problem.psi)
    assert PowerBump.near_critical(in_r3, 0.01).exponent == pytest.approx(-1.5 + 0.01)


def test_ratio_is_scale_invariant(classical_problem):
    base = PiecewiseRandom(3)
    assert ratio(classical_problem, Scaled(base, 25.0)) == pytest.approx(ratio(classical_problem, base), rel=1e-9)


def test_step_function_values():
    f = PiecewiseRandom(11, knots=4, lo=1.0, hi=8.0)
    values = np.exp(f.log_value(None, np.array([0.5, 1.5, 3.0, 6.0, 9.0])))
    assert values[0] == 0.0 and values[-1] == 0.0
    assert np.all((values[1:4] >= 0.05) & (values[1:4] <= 1.0))
    assert f.breakpoints(None) == pytest.approx((1.0, 2.0, 4.0, 8.0))


def test_near_extremizer_support_follows_direction(classical_problem, exponential_outer_problem):
    f = NearExtremizer(2.0)
    assert f.support(classical_problem) == (0.0, 2.0)
    assert f.support(exponential_outer_problem) == (2.0, math.inf)


@pytest.mark.parametrize("factory", [
    lambda: NearExtremizer(0.0),
    lambda: PiecewiseRandom(0, knots=1),
    lambda: PiecewiseRandom(0, lo=2.0, hi=1.0),
    lambda: Scaled(PiecewiseRandom(0), 0.0),
    lambda: FkExtremizer(0),
])
def test_invalid_test_functions(factory):
    with pytest.raises(ParameterError):
        factory()


def test_fk_family_indices():
    family = fk_family(20, k_min=4, step=4)
    assert [f.k for f in family] == [4, 8, 12, 16, 20]
    assert len(fk_family(5)) == 5


def test_fk_annulus(classical_problem):
    assert FkExtremizer(3).annulus(classical_problem) == (0.125, 8.0)


def test_standard_family_is_centered_on_the_argmax(exponential_outer_problem):
    report = compute_B(exponential_outer_problem)
    family = standard_family(exponential_outer_problem, report, seed=5, random_count=3)
    radii = [f.radius for f in family if isinstance(f, NearExtremizer)]
    assert radii[1] == pytest.approx(report.argmax_R)
    assert sum(isinstance(f, PiecewiseRandom) for f in family) == 3
    assert standard_family(exponential_outer_problem, report, seed=5, random_count=3) == family


# --- seeded problems ---

def test_seeded_problems_are_deterministic():
    first = seeded_problems(7, 6)
    assert [pb.describe() for pb in first] == [pb.describe() for pb in seeded_problems(7, 6)]
    assert [pb.describe() for pb in first] != [pb.describe() for pb in seeded_problems(8, 6)]


def test_problem_depends_only_on_seed_and_index():
    short, long = seeded_problems(7, 3), seeded_problems(7, 9)
    assert [pb.describe() for pb in short] == [pb.describe() for pb in long[:3]]
    assert long[4].space == suite_spaces()[0]
    assert long[4].name == "suite-7-4"


def test_seeded_problems_satisfy_p_le_q():
    for pb in seeded_problems(3, 40):
        assert 1.0 < pb.p <= pb.q


def test_seeded_suite_passes_the_sandwich():
    failures = []
    for pb in seeded_problems(7, 20):
        report = compute_B(pb)
        assert report.is_finite, pb.label
        result = sandwich_check(pb, standard_family(pb, report, seed=7), report)
        if result.verdict != Verdict.PASS:
            failures.append(pb.label)
    assert failures == []
