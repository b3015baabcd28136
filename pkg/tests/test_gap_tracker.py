import math

import numpy as np
import pytest

from dualgap.errors import ConfigError, InvariantViolation, MissingConstant, UnknownSetting, Unsupported
from dualgap.gap_tracker import (
    CSV_COLUMNS,
    GapTracker,
    History,
    Step,
    build_schedule,
    discretization_error,
    error_terms,
    fenchel_lower_bound,
    lower_bound,
    theorem_bound,
    upper_bound,
)
from dualgap.gap_tracker import schedule as schedules
from dualgap.mirror_maps import FeasibleSet, make_map
from dualgap.problems import make_instance
from dualgap.solvers import run


def _history(setting, weights, values, map_=None, extras=None):
    """Hand-built history with scalar points at 0 and the given f-values."""
    schedule = schedules.custom(weights)
    history = History(setting, schedule)
    for i, value in enumerate(values):
        x = np.zeros(1)
        history.append(Step(
            i=i, a=schedule.a(i), A=schedule.A(i), x=x, grad=np.zeros(1), value=value, psi_value=0.0,
            z=np.zeros(1), x_hat=x, hat_value=value, hat_psi=0.0, map=map_,
            extras=(extras or [{}] * len(values))[i],
        ))
    return history


# -- schedules ---------------------------------------------------------------


def test_amd_schedule_values():
    schedule = schedules.amd(3, smooth=1.0, strong_convexity=1.0)
    assert schedule.a(3) == 2.0
    assert schedule.A(3) == 5.0


@pytest.mark.parametrize("kappa,ratio", [(4.0, 0.390388), (1.0, 0.618034)])
def test_asc_ratio(kappa, ratio):
    assert schedules.asc_ratio(kappa) == pytest.approx(ratio, abs=1e-6)


def test_asc_weights_have_fixed_ratio():
    schedule = schedules.asc(30, kappa=4.0)
    ratios = [schedule.a(i) / schedule.A(i) for i in range(1, 31)]
    np.testing.assert_allclose(ratios, schedules.asc_ratio(4.0), rtol=1e-12)
    assert schedule.a(0) == 1.0
    assert schedule.params["normalization"] == 1.0
    assert schedule.params["saturation"] is None


def test_long_geometric_schedule_is_recentred():
    # kappa = 4: log A grows by 0.495 per step, 495 over the run
    schedule = schedules.asc(1000, 4.0)
    assert schedule.params["saturation"] is None
    assert schedule.a(0) == pytest.approx(math.exp(-0.5 * 1000 * -math.log1p(-schedules.asc_ratio(4.0))))
    assert math.log(schedule.A(1000)) == pytest.approx(-math.log(schedule.a(0)), rel=1e-9)
    ratios = [schedule.a(i) / schedule.A(i) for i in (1, 500, 1000)]
    np.testing.assert_allclose(ratios, schedules.asc_ratio(4.0), rtol=1e-9)


@pytest.mark.parametrize("builder,kappa,ratio", [
    (schedules.asc, 1.0, schedules.asc_ratio(1.0)),
    (schedules.asc_unconstrained, 1.05, 1.0 / math.sqrt(1.05)),
])
def test_fast_geometric_schedules_saturate(builder, kappa, ratio):
    schedule = builder(1000, kappa)
    assert np.all(np.isfinite(schedule.weights))
    assert schedule.a(0) == pytest.approx(math.exp(-schedules.LOG_A_LIMIT))
    assert math.log(schedule.A(1000)) < schedules.LOG_A_LIMIT + 10.0
    saturation = schedule.params["saturation"]
    assert 0 < saturation < 1000
    assert schedule.a(saturation) / schedule.A(saturation) == pytest.approx(ratio, rel=1e-9)
    assert schedule.a(1000) == schedule.a(saturation + 1)
    assert schedule.a(1000) / schedule.A(1000) < ratio


def test_fw_schedule_prefix_sums():
    schedule = schedules.fw(10)
    assert [schedule.A(k) for k in range(11)] == [(k + 1) * (k + 2) / 2 for k in range(11)]


def test_mp_schedule_starts_at_zero():
    schedule = schedules.mp(5, 0.5)
    assert schedule.a(0) == 0.0
    assert schedule.A(5) == pytest.approx(2.5)


def test_zero_weights_rejected_outside_mirror_prox():
    with pytest.raises(ConfigError):
        schedules.custom([0.0, 1.0])


def test_scaled_schedule_leaves_theorem_coverage():
    scaled = schedules.amd(5, 1.0).scaled(2.0)
    assert scaled.kind == "custom"
    assert not scaled.in_theorem_coverage
    assert scaled.a(2) == 2.0 * schedules.amd(5, 1.0).a(2)


def test_build_schedule():
    assert build_schedule("fw", 4).A(4) == 15.0
    assert len(build_schedule("custom", 2, weights=[1.0, 1.0, 1.0])) == 3
    with pytest.raises(ConfigError):
        build_schedule("custom", 5, weights=[1.0])
    with pytest.raises(ConfigError):
        build_schedule("cosine", 5)
    with pytest.raises(ConfigError):
        build_schedule("amd", 5, smooth=1.0, momentum=0.9)


# -- bounds ------------------------------------------------------------------


def test_upper_bound_examples():
    assert upper_bound("md", _history("md", [1.0, 1.0], [1.0, 0.5])) == pytest.approx(0.75)
    assert upper_bound("cmd", _history("cmd", [1.0, 2.0, 4.0], [2.0, 1.0, 0.5])) == pytest.approx(6.0 / 7.0)
    assert upper_bound("gd", _history("gd", [1.0, 1.0], [0.3, 0.125])) == pytest.approx(0.125)


def test_unknown_setting():
    with pytest.raises(UnknownSetting):
        upper_bound("sgd", _history("md", [1.0], [1.0]))


def test_lower_bound_single_point_example():
    map_ = make_map(FeasibleSet.rn(1), "euclidean", center=[1.0])
    schedule = schedules.custom([1.0])
    history = History("md", schedule)
    x = np.array([1.0])
    history.append(Step(i=0, a=1.0, A=1.0, x=x, grad=np.array([1.0]), value=0.5, psi_value=0.0,
                        z=np.array([-1.0]), x_hat=x, hat_value=0.5, hat_psi=0.0, map=map_))
    assert lower_bound("md", history) == pytest.approx(0.0)


def test_frank_wolfe_lower_bound_example():
    history = History("fw", schedules.fw(0))
    x = np.array([1.0, 0.0, 0.0])
    history.append(Step(i=0, a=1.0, A=1.0, x=x, grad=x.copy(), value=0.5, psi_value=0.0, z=-x, x_hat=x,
                        hat_value=0.5, hat_psi=0.0, map=None,
                        extras={"vertex": np.array([0.0, 1.0, 0.0]), "vertex_psi": 0.0}))
    assert lower_bound("fw", history) == pytest.approx(-0.5)


def test_lower_bound_is_minus_infinity_without_weight():
    history = History("mp", schedules.mp(0, 1.0))
    x = np.zeros(2)
    history.append(Step(i=0, a=0.0, A=0.0, x=x, grad=x, value=0.0, psi_value=0.0, z=x, x_hat=x,
                        hat_value=0.0, hat_psi=0.0, map=None))
    assert lower_bound("mp", history) == -math.inf


def test_theorem_bound_examples():
    assert theorem_bound("amd", 1, {"smooth": 1.0, "strong_convexity": 1.0, "bregman": 0.5}) == pytest.approx(1 / 3)
    assert theorem_bound("gd", 0, {"smooth": 1.0, "distance_sq": 4.0}) == 2.0
    assert theorem_bound("md", 3, {"lipschitz": 2.0, "strong_convexity": 1.0, "bregman": 2.0}) == pytest.approx(2.0)
    assert theorem_bound("asc-unconstrained", 2, {"kappa": 4.0, "bregman": 1.0}) == pytest.approx(0.25)
    assert theorem_bound("mp", 0, {"max_phi": 1.0, "step": 1.0}) == math.inf
    assert theorem_bound("mp", 4, {"max_phi": 1.0, "step": 0.5}) == pytest.approx(0.5)


def test_fw_sum_is_tighter_than_the_simplified_bound():
    params = {"hoelder_constant": 2.0, "hoelder_nu": 1.0, "diameter": 1.5}
    for k in (0, 1, 10, 100):
        assert theorem_bound("fw-sum", k, params) <= theorem_bound("fw", k, params) * (1 + 1e-12)


def test_vi_dual_averaging_bound():
    params = {"max_phi": 1.0, "strong_convexity": 1.0, "operator_bound": 2.0, "weights": [0.5, 0.5, 0.5]}
    assert theorem_bound("md-vi", 2, params) == pytest.approx((1.0 + 0.75 * 4.0 / 2.0) / 1.5)


def test_theorem_bound_missing_constant():
    with pytest.raises(MissingConstant):
        theorem_bound("amd", 3, {"smooth": 1.0})
    with pytest.raises(UnknownSetting):
        theorem_bound("sgd", 3, {})


# -- tracker -----------------------------------------------------------------


def test_gd_on_scalar_quadratic(scalar_quadratic):
    objective, truth = scalar_quadratic
    result = run("gd", objective, k_max=1, truth=truth, x0=[2.0])
    first, second = result.records
    assert first.U == pytest.approx(objective.value(result.history[0].x_hat))
    assert second.scaled_gap - first.scaled_gap <= second.Ed + 1e-9
    assert result.history[1].x[0] == pytest.approx(0.0)


def test_zero_steps_give_one_finite_record(scalar_quadratic):
    objective, truth = scalar_quadratic
    result = run("md", objective, k_max=0, truth=truth)
    assert len(result.records) == 1
    assert math.isfinite(result.final.G)
    assert math.isnan(result.final.row()["Ed"])
    assert result.tracker.max_chain_violation == -math.inf


@pytest.mark.parametrize("tag,descriptor", [
    ("md", {"family": "huber", "dim": 3}),
    ("cmd", {"family": "lasso", "dim": 3, "set": {"kind": "box", "half_width": 1.0}}),
    ("amd", {"family": "quadratic", "dim": 3}),
    ("asc", {"family": "quadratic", "dim": 3}),
    ("fw", {"family": "simplex-quadratic", "dim": 3}),
])
def test_running_tracker_matches_history_formulas(tag, descriptor):
    objective, truth = make_instance(descriptor, seed=2)
    result = run(tag, objective, k_max=40, truth=truth)
    correction = result.tracker.correction
    for k in (0, 1, 17, 40):
        record = result.records[k]
        assert record.U == pytest.approx(upper_bound(tag, result.history, k=k), rel=1e-9, abs=1e-9)
        assert record.L == pytest.approx(lower_bound(tag, result.history, correction=correction, k=k),
                                         rel=1e-9, abs=1e-9)
    for k in (1, 17, 40):
        assert result.records[k].Ed == pytest.approx(error_terms(tag, k, result.history).equality,
                                                     rel=1e-9, abs=1e-12)


def test_chain_and_bounds_hold_on_a_tracked_run(quadratic):
    objective, truth = quadratic
    result = run("amd", objective, k_max=100, truth=truth)
    assert result.tracker.violations == []
    assert all(r.L <= truth.f_star + 1e-9 <= r.U + 2e-9 for r in result.records)
    assert result.tracker.max_chain_violation <= 1e-9
    assert all(r.f_xhat - truth.f_star <= r.theorem_bound * (1 + 1e-8) for r in result.records)


def test_gd_discretization_error_is_nonpositive(quadratic):
    objective, truth = quadratic
    result = run("gd", objective, k_max=30, truth=truth)
    assert all(discretization_error("gd", i, result.history) <= 1e-9 for i in range(1, 31))


def test_fenchel_lower_bound_matches_tracker(quadratic):
    objective, truth = quadratic
    result = run("amd", objective, k_max=25, truth=truth)
    correction = result.tracker.correction
    for k in (1, 10, 25):
        dual = fenchel_lower_bound("amd", result.history, objective, correction=correction, k=k)
        assert dual == pytest.approx(result.records[k].L, rel=1e-8, abs=1e-10)


def test_fenchel_form_unsupported_for_frank_wolfe():
    objective, truth = make_instance({"family": "simplex-quadratic", "dim": 3})
    result = run("fw", objective, k_max=3, truth=truth)
    with pytest.raises(Unsupported):
        fenchel_lower_bound("fw", result.history, objective)


def test_wrong_optimum_is_flagged(quadratic):
    objective, truth = quadratic
    tracker = GapTracker("gd", correction=1.0, f_star=truth.f_star - 1.0, strict=False)
    run("gd", objective, k_max=60, truth=truth, tracker=tracker)
    assert any(v.which == "lower-bound" for v in tracker.violations)


def test_strict_tracker_raises_on_doubled_weights():
    objective, truth = make_instance({"family": "quadratic", "diag": [1.0, 4.0], "b": [0.0, 0.0]})
    broken = schedules.amd(50, 4.0, 1.0).scaled(2.0)
    with pytest.raises(InvariantViolation) as info:
        run("amd", objective, schedule=broken, k_max=50, truth=truth, x0=[1.0, 1.0])
    assert info.value.k <= 50


def test_record_row_has_the_csv_columns(quadratic):
    objective, truth = quadratic
    row = run("gd", objective, k_max=2, truth=truth).final.row()
    assert tuple(row) == CSV_COLUMNS
