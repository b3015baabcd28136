import dataclasses

import numpy as np
import pytest

from tests.conftest import half_norm_squared
from dualgap.errors import (
    IncompatibleConfiguration,
    InvariantViolation,
    MissingConstant,
    NoLMO,
    NotSmooth,
    UnknownSetting,
    Unsupported,
)
from dualgap.gap_tracker import schedule as schedules
from dualgap.mirror_maps import FeasibleSet, make_map
from dualgap.problems import make_instance
from dualgap.solvers import (
    HANDLERS,
    AcceleratedMirrorDescentHandler,
    amd_step,
    asc_step,
    cmd_step,
    default_map,
    default_schedule,
    fw_step,
    gd_step,
    get_solver,
    md_step,
    mp_step,
    run,
)

CASES = [
    ("md", {"family": "huber", "dim": 3}),
    ("cmd", {"family": "lasso", "dim": 4, "set": {"kind": "box", "half_width": 1.0}}),
    ("amd", {"family": "quadratic", "dim": 5}),
    ("gd", {"family": "quadratic", "dim": 5}),
    ("asc", {"family": "quadratic", "dim": 5}),
    ("asc-unconstrained", {"family": "quadratic", "dim": 5}),
    ("fw", {"family": "simplex-quadratic", "dim": 5}),
]


@pytest.mark.parametrize("tag,descriptor", CASES, ids=[tag for tag, _ in CASES])
@pytest.mark.parametrize("seed", [0, 1])
def test_theorem_bound_dominates_the_optimality_gap(tag, descriptor, seed):
    problem, truth = make_instance(descriptor, seed)
    result = run(tag, problem, k_max=200, truth=truth)
    assert result.tracker.theorem is not None
    assert result.tracker.violations == []
    for record in result.records:
        assert record.f_xhat >= truth.f_star - 1e-9
    assert result.final.f_xhat - truth.f_star <= result.final.theorem_bound * (1 + 1e-8) + 1e-12


@pytest.mark.slow
@pytest.mark.parametrize("tag,descriptor", CASES, ids=[tag for tag, _ in CASES])
def test_long_runs_stay_within_the_theorem(tag, descriptor):
    problem, truth = make_instance(descriptor, seed=4)
    result = run(tag, problem, k_max=1000, truth=truth)
    assert result.final.f_xhat - truth.f_star <= result.final.theorem_bound * (1 + 1e-8) + 1e-12


def test_lazy_gradient_descent_matches_the_classical_update():
    problem, _ = make_instance({"family": "quadratic", "dim": 5}, seed=3)
    result = run("gd", problem, k_max=100, tracker_on=False)
    x = result.history[0].x.copy()
    for step in result.history:
        np.testing.assert_allclose(step.x, x, rtol=0, atol=1e-12 * (1 + np.linalg.norm(x)))
        x = x - problem.gradient(x) / problem.constants.smooth


def test_composite_descent_without_psi_is_mirror_descent():
    problem, truth = make_instance({"family": "quadratic", "dim": 4, "set": {"kind": "box", "half_width": 0.5}})
    schedule = schedules.md_decaying(100, 0.5)
    md = run("md", problem, schedule=schedule, k_max=100, truth=truth)
    cmd = run("cmd", problem, schedule=schedule, k_max=100, truth=truth)
    for a, b in zip(md.history, cmd.history):
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.x_hat, b.x_hat)


def test_frank_wolfe_first_step(simplex3):
    result = run("fw", half_norm_squared(simplex3), k_max=1, tracker_on=False, x0=[1.0, 0.0, 0.0])
    np.testing.assert_array_equal(result.history[0].extra("vertex"), [0.0, 1.0, 0.0])
    np.testing.assert_allclose(result.history[1].x, [1 / 3, 2 / 3, 0.0], atol=1e-15)


def test_frank_wolfe_gap_certifies_optimality(simplex3):
    result = run("fw", half_norm_squared(simplex3), k_max=300)
    assert result.final.L <= 1 / 6 + 1e-12 <= result.final.U + 1e-12
    assert result.final.G < 0.05


def test_composite_run_keeps_iterates_in_the_box():
    problem, truth = make_instance({"family": "lasso", "dim": 3, "set": {"kind": "box", "half_width": 0.3}}, seed=5)
    result = run("cmd", problem, k_max=50, truth=truth)
    for step in result.history:
        assert problem.feasible_set.contains(step.x, 1e-12)
        assert problem.feasible_set.contains(step.x_hat, 1e-12)


def test_run_unpacks_into_history_and_records(quadratic):
    objective, truth = quadratic
    history, records = run("amd", objective, k_max=5, truth=truth)
    assert history.k == 5
    assert [r.k for r in records] == list(range(6))


def test_untracked_run_has_no_records(quadratic):
    objective, _ = quadratic
    result = run("amd", objective, k_max=5, tracker_on=False)
    assert result.records == []
    assert result.final is None
    with pytest.raises(MissingConstant):
        result.f_gap()


def test_f_gap_decreases_for_accelerated_descent(quadratic):
    objective, truth = quadratic
    gaps = run("amd", objective, k_max=200, truth=truth).f_gap()
    assert gaps[-1] < 1e-3 * gaps[0]


def test_handlers_cover_every_tag():
    assert sorted(HANDLERS) == sorted(["md", "mp", "cmd", "amd", "gd", "asc", "asc-unconstrained", "fw"])
    assert get_solver("AMD") is HANDLERS["amd"]
    with pytest.raises(UnknownSetting):
        get_solver("adam")


def test_accelerated_descent_needs_smoothness():
    problem, _ = make_instance({"family": "huber", "dim": 2})
    with pytest.raises(NotSmooth):
        run("amd", problem, k_max=5)


def test_frank_wolfe_needs_a_bounded_set(quadratic):
    objective, _ = quadratic
    with pytest.raises(NoLMO):
        run("fw", objective, k_max=5)


def test_gradient_descent_is_unconstrained():
    problem, _ = make_instance({"family": "quadratic", "dim": 2, "set": {"kind": "box", "half_width": 1.0}})
    with pytest.raises(Unsupported):
        run("gd", problem, k_max=5)


def test_unconstrained_variant_rejects_a_box():
    problem, _ = make_instance({"family": "quadratic", "dim": 2, "set": {"kind": "box", "half_width": 1.0}})
    with pytest.raises(IncompatibleConfiguration):
        run("asc-unconstrained", problem, k_max=5)


def test_infeasible_start_is_rejected():
    region = FeasibleSet.cube(2, 1.0)
    with pytest.raises(IncompatibleConfiguration):
        run("amd", half_norm_squared(region), map_=make_map(region, "euclidean"), k_max=5, x0=[2.0, 0.0])


def test_schedule_must_cover_the_run(quadratic):
    objective, _ = quadratic
    with pytest.raises(IncompatibleConfiguration):
        run("amd", objective, schedule=schedules.amd(3, 4.0), k_max=10)
    with pytest.raises(IncompatibleConfiguration):
        run("amd", objective, k_max=-1)


def test_off_center_start_skips_the_theorem(quadratic):
    objective, truth = quadratic
    map_ = make_map(objective.feasible_set, "euclidean")
    result = run("amd", objective, map_=map_, k_max=20, truth=truth, x0=[0.5, 0.5])
    assert result.tracker.theorem is None
    assert result.final.theorem_bound is None


WELL_CONDITIONED = {"family": "quadratic", "diag": [1.0, 1.2], "b": [1.0, 1.2]}


@pytest.mark.parametrize("tag,descriptor", [
    ("asc", WELL_CONDITIONED),
    ("asc", {"family": "quadratic", "diag": [1.0, 1.0], "b": [1.0, 1.0]}),
    ("asc-unconstrained", WELL_CONDITIONED),
])
def test_strongly_convex_methods_run_a_thousand_steps(tag, descriptor):
    problem, truth = make_instance(descriptor)
    result = run(tag, problem, k_max=1000, truth=truth)
    assert result.history.schedule.params["saturation"] is not None
    assert result.tracker.violations == []
    assert all(np.isfinite(record.G) for record in result.records)
    assert result.final.f_xhat - truth.f_star <= 1e-12


@pytest.mark.parametrize("tag", ["asc", "asc-unconstrained"])
def test_rescaled_schedule_leaves_the_iterates_unchanged(tag):
    problem, truth = make_instance(WELL_CONDITIONED)
    short = run(tag, problem, k_max=20, truth=truth)
    long = run(tag, problem, k_max=1000, truth=truth)
    assert short.history.schedule.params["normalization"] == 1.0
    assert long.history.schedule.params["normalization"] < 1e-100
    for k in range(21):
        np.testing.assert_allclose(long.history[k].x_hat, short.history[k].x_hat, rtol=1e-9, atol=1e-12)
        assert long.records[k].G == pytest.approx(short.records[k].G, rel=1e-6, abs=1e-12)


STEP_FUNCTIONS = {
    "md": md_step,
    "mp": mp_step,
    "amd": amd_step,
    "gd": gd_step,
    "asc": asc_step,
    "asc-unconstrained": asc_step,
    "cmd": cmd_step,
    "fw": fw_step,
}
STEP_CASES = CASES + [("mp", {"family": "quadratic", "dim": 3, "set": {"kind": "box", "half_width": 1.0}})]


@pytest.mark.parametrize("tag,descriptor", STEP_CASES, ids=[tag for tag, _ in STEP_CASES])
def test_single_steps_match_the_runner(tag, descriptor):
    problem, truth = make_instance(descriptor)
    map_ = default_map(tag, problem)
    schedule = default_schedule(tag, problem, map_, 3, truth)
    state, _ = get_solver(tag)(problem, map_, schedule).initialize()
    history = run(tag, problem, map_=map_, schedule=schedule, k_max=3, tracker_on=False).history
    for i in range(1, 4):
        state, step = STEP_FUNCTIONS[tag](state, problem, map_, schedule, i)
        assert state.k == i
        np.testing.assert_array_equal(step.x, history[i].x)
        np.testing.assert_array_equal(state.x_hat, history[i].x_hat)
        np.testing.assert_array_equal(state.z, history[i].z)


def test_gradient_step_lands_on_the_minimizer(scalar_quadratic):
    problem, _ = scalar_quadratic
    map_ = make_map(problem.feasible_set, "euclidean", center=[2.0])
    schedule = schedules.gd(1, smooth=1.0)
    state, _ = get_solver("gd")(problem, map_, schedule).initialize([2.0])
    state, _ = gd_step(state, problem, map_, schedule, 1)
    np.testing.assert_allclose(state.x, [0.0], atol=1e-15)


def test_frank_wolfe_step_from_a_vertex(simplex3):
    problem = half_norm_squared(simplex3)
    map_ = make_map(simplex3, "euclidean")
    schedule = schedules.fw(1)
    state, _ = get_solver("fw")(problem, map_, schedule).initialize([1.0, 0.0, 0.0])
    state, _ = fw_step(state, problem, map_, schedule, 1)
    np.testing.assert_allclose(state.x, [1 / 3, 2 / 3, 0.0], atol=1e-15)


def test_dual_aggregate_drift_is_reported_at_its_step(monkeypatch, quadratic):
    objective, _ = quadratic
    original = AcceleratedMirrorDescentHandler.step

    def drifting(self, state, i):
        state, step = original(self, state, i)
        if i == 2:
            step = dataclasses.replace(step, z=step.z + 1.0)
        return state, step

    monkeypatch.setattr(AcceleratedMirrorDescentHandler, "step", drifting)
    with pytest.raises(InvariantViolation) as info:
        run("amd", objective, k_max=10, tracker_on=False)
    assert (info.value.k, info.value.which) == (2, "dual-aggregate")
