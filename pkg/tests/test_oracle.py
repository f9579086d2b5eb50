import math

import numpy as np
import pytest

from stepfourier import (
    FDConfig,
    FDConfigError,
    Field,
    FourierState,
    StepProblem,
    UnsupportedOrderError,
    build,
    compare,
    evaluate_on,
    fd_solve,
)

from _helpers import load

PI = math.pi


def spectral_on(problem, reference):
    return evaluate_on(build(problem), reference.t_values, reference.x_values)


def heat_error(nx, dt=1e-4, t_end=0.5):
    ref = fd_solve(load("heat").problem, FDConfig(nx=nx, dt=dt), t_end)
    exact = math.exp(-t_end) * np.sin(ref.x_values)
    return float(np.max(np.abs(ref.values[0] - exact)))


def test_heat_matches_exact_solution():
    assert heat_error(256) <= 1e-3


def test_zero_initial_condition_stays_zero():
    p = StepProblem(PI, 1.0, (0.0, 1.0), (-PI, PI), 2, (((1.0, 2.0, 0.5),),), FourierState.zeros(2))
    ref = fd_solve(p, FDConfig(nx=32, dt=1e-3), 0.5)
    assert not np.any(ref.values)


def test_reaction_only_problem():
    p = StepProblem(PI, 2.0, (0.0, 2.0), (-PI, PI), 2, (((1.0, 0.0, 0.0),),),
                    FourierState(0.0, ((0.0, 1.0),)))
    ref = fd_solve(p, FDConfig(nx=64, dt=1e-4), 1.0)
    np.testing.assert_allclose(ref.values[0], math.e * np.sin(ref.x_values), rtol=0, atol=1e-6)


def test_grid_and_metadata():
    problem = load("heat").problem
    ref = fd_solve(problem, FDConfig(nx=16, dt=1e-3), 0.5)
    np.testing.assert_array_equal(ref.x_values, -PI + (2 * PI / 16) * np.arange(16))
    np.testing.assert_array_equal(ref.t_values, [0.5])
    assert ref.problem_hash == problem.digest()


def test_convergence_is_second_order():
    errors = [heat_error(nx) for nx in (32, 64, 128)]
    for coarse, fine in zip(errors, errors[1:]):
        assert coarse / fine >= 3.5


@pytest.mark.parametrize("name, t_end", [("heat_step", 0.75), ("heat_step", 0.25),
                                         ("advect_step", 1.5)])
def test_agrees_with_spectral_on_step_fixtures(name, t_end):
    problem = load(name).problem
    ref = fd_solve(problem, FDConfig(nx=256, dt=1e-4), t_end)
    assert compare(spectral_on(problem, ref), ref).max_error <= 5e-3


def test_step_fixture_against_closed_form():
    problem = load("heat_step").problem
    ref = fd_solve(problem, FDConfig(), 0.75)
    exact = math.exp(-0.25 - 0.5 * 0.5) * np.sin(ref.x_values)
    assert np.max(np.abs(ref.values[0] - exact)) <= 1e-3


def test_high_order_is_unsupported():
    with pytest.raises(UnsupportedOrderError):
        fd_solve(load("ex3_3").problem, FDConfig(), 1.0)


def test_unused_high_order_slots_are_fine():
    p = StepProblem(PI, 1.0, (0.0, 1.0), (-PI, PI), 4, (((0.0, 0.0, 1.0, 0.0, 0.0),),),
                    FourierState(0.0, ((0.0, 1.0),)))
    assert fd_solve(p, FDConfig(nx=32, dt=1e-3), 0.5).values.shape == (1, 32)


def test_stability_violation():
    with pytest.raises(FDConfigError):
        fd_solve(load("heat").problem, FDConfig(nx=256, dt=1e-2), 0.5)


def test_config_validation():
    with pytest.raises(FDConfigError):
        FDConfig(nx=8)
    with pytest.raises(FDConfigError):
        FDConfig(dt=0.0)


def test_t_end_must_be_inside_horizon():
    with pytest.raises(ValueError):
        fd_solve(load("heat").problem, FDConfig(nx=32, dt=1e-3), 1.0)


# -- compare -----------------------------------------------------------------------------

def field(values, absent=None):
    values = np.asarray(values, dtype=float)
    absent = np.zeros(values.shape, bool) if absent is None else absent
    return Field(np.arange(values.shape[0], dtype=float), np.arange(values.shape[1], dtype=float),
                 values, absent)


def test_compare_identical_fields():
    f = field([[1.0, 2.0], [3.0, 4.0]])
    report = compare(f, f)
    assert (report.max_error, report.rms_error) == (0.0, 0.0)


def test_compare_constant_offset():
    a = field(np.zeros((3, 5)))
    b = field(np.ones((3, 5)))
    report = compare(a, b)
    assert (report.max_error, report.rms_error) == (1.0, 1.0)


def test_compare_locates_maximum_and_skips_absent():
    a = field([[0.0, 0.0], [0.0, 0.0]])
    b = field([[0.1, np.nan], [0.0, -0.5]], absent=np.array([[False, True], [False, False]]))
    report = compare(a, b)
    assert report.max_error == 0.5 and report.where == (1.0, 1.0)
    assert report.rms_error == pytest.approx(math.sqrt((0.01 + 0.25) / 3))


def test_compare_grid_mismatch():
    a = field(np.zeros((2, 2)))
    b = Field([0.0, 1.0], [0.0, 2.0], np.zeros((2, 2)), np.zeros((2, 2), bool))
    with pytest.raises(ValueError):
        compare(a, b)
