import numpy as np
import pytest

from dualgap.errors import ConfigError, EmptyProbeSet, InvariantViolation, UnknownFamily
from dualgap.mirror_maps import FeasibleSet
from dualgap.problems import (
    FAMILIES,
    Constants,
    MonotoneOp,
    Objective,
    SaddleProblem,
    certify,
    make_instance,
    make_probes,
    make_set,
    reference_solve,
    restricted_vi_gap,
)

DESCRIPTORS = [
    {"family": "quadratic", "dim": 4},
    {"family": "quadratic", "dim": 3, "set": {"kind": "box", "half_width": 0.2}},
    {"family": "simplex-quadratic", "dim": 4},
    {"family": "lasso", "dim": 3},
    {"family": "huber", "dim": 3},
    {"family": "huber", "dim": 2, "delta": 0.5},
    {"family": "bilinear", "random": True, "v_dim": 2, "w_dim": 3},
    {"family": "matrix-game", "v_dim": 3},
    {"family": "zero"},
    {"family": "zero", "operator": True},
]


def test_quadratic_closed_form(quadratic):
    objective, truth = quadratic
    assert truth.method == "closed-form"
    np.testing.assert_allclose(truth.x_star, [1.0, 1.0])
    assert truth.f_star == pytest.approx(-2.5)
    assert objective.constants.condition == pytest.approx(4.0)


def test_quadratic_conjugate_is_fenchel_dual(quadratic):
    objective, _ = quadratic
    rng = np.random.default_rng(0)
    for x in rng.standard_normal((10, 2)):
        g = objective.gradient(x)
        assert objective.conjugate(g) == pytest.approx(float(g @ x) - objective.value(x))


@pytest.mark.parametrize("descriptor", DESCRIPTORS, ids=lambda d: d["family"])
def test_families_build_and_certify(descriptor):
    problem, truth = make_instance(descriptor, seed=3)
    assert np.all(np.isfinite(truth.x_star))
    assert problem.feasible_set.contains(truth.x_star, 1e-9)


@pytest.mark.parametrize("descriptor", DESCRIPTORS[:4], ids=lambda d: d["family"])
def test_instances_are_deterministic_in_seed(descriptor):
    first, _ = make_instance(descriptor, seed=1)
    second, _ = make_instance(descriptor, seed=1)
    x = np.full(first.dim, 0.1)
    assert first.value(x) == second.value(x)


def test_constrained_quadratic_uses_reference_solve():
    objective, truth = make_instance({"family": "quadratic", "diag": [1.0, 1.0], "minimizer": [2.0, 0.0],
                                      "set": {"kind": "box", "half_width": 1.0}})
    assert truth.method == "reference-solve"
    np.testing.assert_allclose(truth.x_star, [1.0, 0.0], atol=1e-9)


def test_lasso_truth_satisfies_prox_fixed_point():
    objective, truth = make_instance({"family": "lasso", "matrix": [[1.0]], "target": [3.0], "lam": 1.0})
    np.testing.assert_allclose(truth.x_star, [2.0], atol=1e-9)
    assert truth.f_star == pytest.approx(2.5, abs=1e-9)


def test_matrix_game_value():
    problem, truth = make_instance({"family": "matrix-game", "matrix": [[1.0, -1.0], [-1.0, 1.0]]})
    assert isinstance(problem, SaddleProblem)
    assert truth.f_star == pytest.approx(0.0, abs=1e-9)
    np.testing.assert_allclose(truth.x_star, [0.5, 0.5, 0.5, 0.5], atol=1e-9)


def test_unknown_family():
    with pytest.raises(UnknownFamily):
        make_instance({"family": "rosenbrock"})
    assert "rosenbrock" not in FAMILIES


def test_bad_quadratic_spectrum():
    with pytest.raises(ConfigError):
        make_instance({"family": "quadratic", "diag": [1.0, -1.0]})


def test_make_set_kinds():
    assert make_set(None, 3).kind == "rn"
    box = make_set({"kind": "box", "lower": 0.0, "upper": 2.0}, 2)
    np.testing.assert_array_equal(box.upper, [2.0, 2.0])
    assert make_set({"kind": "ball", "radius": 2.0}, 2).diameter() == pytest.approx(4.0)
    with pytest.raises(ConfigError):
        make_set({"kind": "torus"}, 2)


def test_certify_rejects_a_wrong_smoothness_claim():
    region = FeasibleSet.cube(2, 1.0)
    wrong = Objective(dim=2, value=lambda x: 2.0 * float(x @ x), gradient=lambda x: 4.0 * x,
                      feasible_set=region, constants=Constants(smooth=1.0))
    with pytest.raises(InvariantViolation):
        certify(wrong, np.random.default_rng(0))


def test_certify_rejects_a_wrong_gradient():
    region = FeasibleSet.cube(2, 1.0)
    wrong = Objective(dim=2, value=lambda x: float(x @ x), gradient=lambda x: x, feasible_set=region)
    with pytest.raises(InvariantViolation):
        certify(wrong, np.random.default_rng(0))


def test_reference_solve_on_box():
    region = FeasibleSet.cube(1, 1.0)
    objective = Objective(dim=1, value=lambda x: 0.5 * float((x[0] - 3.0) ** 2), gradient=lambda x: x - 3.0,
                          feasible_set=region, constants=Constants(smooth=1.0))
    truth = reference_solve(objective)
    np.testing.assert_allclose(truth.x_star, [1.0])
    assert truth.f_star == pytest.approx(2.0)


def _bilinear_operator():
    problem, _ = make_instance({"family": "bilinear"})
    return problem.operator()


def test_restricted_vi_gap_examples():
    op = _bilinear_operator()
    vertices = op.feasible_set.vertices()
    assert restricted_vi_gap(op, np.zeros(2), vertices) == pytest.approx(0.0, abs=1e-15)
    assert restricted_vi_gap(op, np.array([0.5, 0.0]), vertices) == pytest.approx(0.5)


def test_restricted_vi_gap_of_the_zero_operator():
    op, _ = make_instance({"family": "zero", "operator": True})
    probes = op.feasible_set.sample(np.random.default_rng(0), 10)
    assert restricted_vi_gap(op, np.array([0.3, -0.2]), probes) == 0.0


def test_restricted_vi_gap_needs_points():
    with pytest.raises(EmptyProbeSet):
        restricted_vi_gap(_bilinear_operator(), np.zeros(2), np.empty((0, 2)))


def test_induced_operator_is_monotone():
    problem, _ = make_instance({"family": "bilinear", "random": True, "v_dim": 3, "w_dim": 2}, seed=4)
    op = problem.operator()
    assert isinstance(op, MonotoneOp)
    rng = np.random.default_rng(1)
    for x, y in zip(op.feasible_set.sample(rng, 50), op.feasible_set.sample(rng, 50)):
        assert np.dot(op.operator(x) - op.operator(y), x - y) >= -1e-12


def test_gap_points_include_vertices_and_extra_point():
    region = FeasibleSet.cube(2, 1.0)
    probes = make_probes(region, np.random.default_rng(0), n_random=10, extra=[0.25, 0.25])
    assert probes.shape == (4 + 10 + 1, 2)
    np.testing.assert_array_equal(probes[-1], [0.25, 0.25])
    assert all(region.contains(p) for p in probes)


def test_gap_points_subsample_large_vertex_sets():
    region = FeasibleSet.cube(8, 1.0)
    probes = make_probes(region, np.random.default_rng(0), n_random=5, max_vertices=16)
    assert probes.shape == (16 + 5, 8)
