import math

import numpy as np
import pytest

from dualgap.continuous import (
    AlphaSpec,
    averaging_residual,
    continuous_gap,
    get_dynamics,
    integrate,
    lemma_bound,
    scaled_gap_violation,
)
from dualgap.errors import ConfigError, IncompatibleConfiguration, NoLMO, OffGrid, UnknownSetting
from dualgap.problems import make_instance

QUADRATIC = {"family": "quadratic", "diag": [1.0, 4.0], "b": [1.0, 4.0]}

CASES = {
    "ct-md": ({"family": "quadratic", "diag": [1.0, 4.0], "b": [1.0, 4.0],
               "set": {"kind": "box", "half_width": 2.0}}, AlphaSpec()),
    "ct-gd": (QUADRATIC, AlphaSpec()),
    "ct-amd": (QUADRATIC, AlphaSpec("polynomial", power=2.0)),
    "ct-asc": (QUADRATIC, AlphaSpec()),
    "ct-cmd": ({"family": "lasso", "matrix": [[1.0]], "target": [3.0], "lam": 0.5,
                "set": {"kind": "box", "half_width": 2.0}}, AlphaSpec()),
    "ct-fw": ({"family": "simplex-quadratic", "diag": [1.0, 1.0, 1.0], "minimizer": [2.0, 0.0, 0.0]}, AlphaSpec()),
}


def test_gradient_flow_matches_the_exponential():
    problem, truth = make_instance({"family": "quadratic", "diag": [1.0], "b": [0.0]})
    result = integrate("ct-gd", problem, h=1e-3, T=2.0, x0=[1.0], truth=truth)
    assert result.points[-1][0] == pytest.approx(math.exp(-2.0), abs=1e-6)
    assert result.final.t == 2.0


@pytest.mark.parametrize("tag", sorted(CASES))
def test_lemma_bound_holds_at_the_horizon(tag):
    descriptor, alpha = CASES[tag]
    problem, truth = make_instance(descriptor)
    result = integrate(tag, problem, alpha=alpha, h=1e-2, T=1.0, truth=truth)
    final = result.final
    assert final.f_xhat - truth.f_star <= final.lemma_bound * 1.1 + 1e-12
    assert final.lemma_bound == pytest.approx(lemma_bound(result, 1.0))
    assert all(np.isfinite(record.G) for record in result.records)


@pytest.mark.parametrize("tag", sorted(CASES))
def test_scaled_gap_violation_shrinks_with_the_step(tag):
    descriptor, alpha = CASES[tag]
    problem, truth = make_instance(descriptor)
    coarse_run = integrate(tag, problem, alpha=alpha, h=1e-2, T=1.0, truth=truth)
    fine_run = integrate(tag, problem, alpha=alpha, h=5e-3, T=1.0, truth=truth)
    coarse, fine = scaled_gap_violation(coarse_run), scaled_gap_violation(fine_run)
    assert fine <= 0.6 * coarse + 1e-9
    assert coarse_run.violation_constant == pytest.approx(coarse / 1e-2)
    assert fine_run.violation_constant <= 1.2 * coarse_run.violation_constant + 1e-6


def test_frank_wolfe_dynamics_average_the_vertices():
    descriptor, alpha = CASES["ct-fw"]
    problem, truth = make_instance(descriptor)
    result = integrate("ct-fw", problem, alpha=alpha, h=1e-2, T=1.0, truth=truth)
    assert averaging_residual(result) <= 1e-6
    assert all(problem.feasible_set.contains(point, 1e-8) for point in result.points)


def test_gap_is_read_on_the_grid():
    descriptor, alpha = CASES["ct-gd"]
    problem, truth = make_instance(descriptor)
    result = integrate("ct-gd", problem, alpha=alpha, h=1e-2, T=1.0, truth=truth)
    assert continuous_gap(result, 0.0) == result.records[0].G
    assert continuous_gap(result, 1.0) == result.final.G
    with pytest.raises(OffGrid):
        continuous_gap(result, 0.123456)


def test_truth_is_solved_for_when_missing():
    problem, _ = make_instance(CASES["ct-md"][0])
    result = integrate("ct-md", problem, h=1e-2, T=1.0)
    assert result.truth.method == "reference-solve"


def test_step_must_be_small_against_the_horizon():
    problem, truth = make_instance(QUADRATIC)
    with pytest.raises(IncompatibleConfiguration):
        integrate("ct-gd", problem, h=0.1, T=1.0, truth=truth)
    with pytest.raises(ConfigError):
        integrate("ct-gd", problem, h=-1e-3, T=1.0, truth=truth)


def test_frank_wolfe_dynamics_need_a_bounded_set():
    problem, truth = make_instance(QUADRATIC)
    with pytest.raises(NoLMO):
        integrate("ct-fw", problem, h=1e-2, T=1.0, truth=truth)


def test_unknown_dynamics():
    with pytest.raises(UnknownSetting):
        get_dynamics("ct-sgd")


@pytest.mark.parametrize("kwargs", [
    {"family": "exponential"},
    {"alpha0": 0.0},
    {"rate": -1.0},
    {"family": "polynomial", "power": 0.0},
])
def test_alpha_spec_validation(kwargs):
    with pytest.raises(ConfigError):
        AlphaSpec(**kwargs)


def test_alpha_families():
    linear = AlphaSpec(alpha0=2.0, rate=3.0)
    assert linear.value(1.0) == 5.0
    assert linear.A(1.0) == 3.0
    polynomial = AlphaSpec("polynomial", power=2.0)
    assert polynomial.value(1.0) == 4.0
    assert polynomial.derivative(1.0) == 4.0
