import math

import numpy as np
import pytest

from dualgap.errors import DomainError, NoLMO, NonFinite, UnboundedSet, Unsupported
from dualgap.mirror_maps import (
    CompositePart,
    FeasibleSet,
    ProductSet,
    TimeVaryingMap,
    bregman,
    bregman_dual,
    conjugate,
    grad_conjugate,
    make_map,
    project_simplex,
    soft_threshold,
)

MAPS = [
    ("euclidean-rn", lambda: make_map(FeasibleSet.rn(3), "euclidean", scale=2.0, center=[0.5, -1.0, 0.0])),
    ("euclidean-box", lambda: make_map(FeasibleSet.cube(3, 1.0), "euclidean")),
    ("euclidean-ball", lambda: make_map(FeasibleSet.ball([0.0, 0.0, 0.0], 1.5), "euclidean", scale=0.5)),
    ("entropy", lambda: make_map(FeasibleSet.simplex(4), "entropy")),
    ("entropy-centered", lambda: make_map(FeasibleSet.simplex(4), "entropy", scale=2.0, center=[0.1, 0.2, 0.3, 0.4])),
]


def test_euclidean_grad_conjugate_unconstrained():
    map_ = make_map(FeasibleSet.rn(2), "euclidean")
    np.testing.assert_allclose(grad_conjugate(map_, [3.0, -2.0]), [3.0, -2.0])


def test_entropy_grad_conjugate_examples():
    np.testing.assert_allclose(grad_conjugate(make_map(FeasibleSet.simplex(3), "entropy"), np.zeros(3)),
                               np.full(3, 1.0 / 3.0))
    np.testing.assert_allclose(grad_conjugate(make_map(FeasibleSet.simplex(2), "entropy"), [math.log(3.0), 0.0]),
                               [0.75, 0.25])


def test_entropy_grad_conjugate_handles_large_duals():
    x = grad_conjugate(make_map(FeasibleSet.simplex(3), "entropy"), [1000.0, 0.0, -1000.0])
    assert np.all(np.isfinite(x))
    assert x[0] == pytest.approx(1.0)


def test_euclidean_box_clamps_and_ball_projects():
    box = make_map(FeasibleSet.cube(2, 1.0), "euclidean")
    np.testing.assert_allclose(grad_conjugate(box, [3.0, -0.5]), [1.0, -0.5])
    ball = make_map(FeasibleSet.ball([0.0, 0.0], 1.0), "euclidean")
    np.testing.assert_allclose(grad_conjugate(ball, [3.0, 4.0]), [0.6, 0.8])


def test_nonfinite_dual_rejected():
    with pytest.raises(NonFinite):
        grad_conjugate(make_map(FeasibleSet.rn(2), "euclidean"), [np.nan, 0.0])


def test_bregman_examples():
    euclidean = make_map(FeasibleSet.rn(2), "euclidean")
    assert bregman(euclidean, [1.0, 0.0], [0.0, 0.0]) == pytest.approx(0.5)
    assert bregman(euclidean, [0.3, 0.2], [0.3, 0.2]) == 0.0
    entropy = make_map(FeasibleSet.simplex(2), "entropy")
    assert bregman(entropy, [0.5, 0.5], [0.25, 0.75]) == pytest.approx(0.143841, abs=1e-6)


def test_entropy_bregman_needs_positive_reference():
    entropy = make_map(FeasibleSet.simplex(2), "entropy")
    with pytest.raises(DomainError):
        bregman(entropy, [0.5, 0.5], [1.0, 0.0])


def test_bregman_dual_examples():
    euclidean = make_map(FeasibleSet.rn(2), "euclidean")
    assert bregman_dual(euclidean, [1.0, 0.0], [0.0, 0.0]) == pytest.approx(0.5)
    assert bregman_dual(euclidean, [1.0, 2.0], [1.0, 2.0]) == pytest.approx(0.0)
    entropy = make_map(FeasibleSet.simplex(2), "entropy")
    value = bregman_dual(entropy, [1.0, 0.0], [0.0, 0.0])
    dx = grad_conjugate(entropy, [1.0, 0.0]) - grad_conjugate(entropy, [0.0, 0.0])
    assert value >= 0.5 * np.sum(np.abs(dx)) ** 2


@pytest.mark.parametrize("name,build", MAPS)
def test_dual_bregman_strong_convexity(name, build):
    map_ = build()
    rng = np.random.default_rng(7)
    for _ in range(200):
        z1, z2 = rng.standard_normal((2, map_.dim))
        dx = grad_conjugate(map_, z1) - grad_conjugate(map_, z2)
        slack = bregman_dual(map_, z1, z2) - 0.5 * map_.strong_convexity * map_.primal_norm(dx) ** 2
        assert slack >= -1e-10


@pytest.mark.parametrize("name,build", MAPS)
def test_three_point_identity(name, build):
    map_ = build()
    rng = np.random.default_rng(11)
    for _ in range(200):
        x, y, z = rng.standard_normal((3, map_.dim))
        cross = float(np.dot(grad_conjugate(map_, z) - grad_conjugate(map_, y), x - z))
        rhs = bregman_dual(map_, z, y) + cross + bregman_dual(map_, x, z)
        assert bregman_dual(map_, x, y) == pytest.approx(rhs, abs=1e-10)


@pytest.mark.parametrize("name,build", MAPS)
def test_grad_conjugate_first_order_optimality(name, build):
    map_ = build()
    rng = np.random.default_rng(3)
    region = map_.feasible_set
    for _ in range(20):
        z = 2.0 * rng.standard_normal(map_.dim)
        x = grad_conjugate(map_, z)
        assert region.contains(x, 1e-12)
        probes = region.sample(rng, 100)
        assert np.max((probes - x) @ (z - map_.gradient(x))) <= 1e-9


def test_conjugate_matches_closed_form():
    map_ = make_map(FeasibleSet.rn(2), "euclidean", scale=2.0)
    z = np.array([1.0, -3.0])
    assert conjugate(map_, z) == pytest.approx(float(z @ z) / 4.0)


def test_composite_conjugate_decreases_with_weight():
    base = make_map(FeasibleSet.cube(3, 1.0), "euclidean")
    part = CompositePart(kind="l1", weight=0.5)
    rng = np.random.default_rng(5)
    for _ in range(20):
        z = 3.0 * rng.standard_normal(3)
        values = [conjugate(TimeVaryingMap.with_composite(base, part, w), z) for w in (0.0, 0.5, 1.0, 4.0)]
        assert np.all(np.diff(values) <= 1e-12)


def test_composite_l1_soft_thresholds_then_clamps():
    base = make_map(FeasibleSet.cube(3, 1.0), "euclidean")
    phi = TimeVaryingMap.with_composite(base, CompositePart(kind="l1", weight=1.0), weight=0.5)
    np.testing.assert_allclose(grad_conjugate(phi, [3.0, 0.2, -0.9]), [1.0, 0.0, -0.4])


def test_indicator_on_a_box_projects_onto_the_intersection():
    region = FeasibleSet.ball([0.0, 0.0], 0.5)
    phi = TimeVaryingMap.with_composite(make_map(FeasibleSet.cube(2, 1.0), "euclidean"),
                                        CompositePart(kind="indicator", region=region), 1.0)
    z = np.array([3.0, 3.0])
    x = grad_conjugate(phi, z)
    np.testing.assert_allclose(x, np.full(2, 0.5 / math.sqrt(2.0)), atol=1e-9)
    assert region.contains(x, 1e-9)
    probes = region.sample(np.random.default_rng(0), 200)
    best = max(float(z @ u) - phi.value(u) for u in probes)
    assert conjugate(phi, z) >= best - 1e-9


def test_indicator_on_a_ball_projects_onto_the_intersection():
    half_plane = FeasibleSet.box([0.0, -2.0], [2.0, 2.0])
    phi = TimeVaryingMap.with_composite(make_map(FeasibleSet.ball([0.0, 0.0], 1.0), "euclidean"),
                                        CompositePart(kind="indicator", region=half_plane), 1.0)
    np.testing.assert_allclose(grad_conjugate(phi, [-3.0, 0.5]), [0.0, 0.5], atol=1e-9)


def test_l1_on_a_ball_is_solved_by_splitting():
    phi = TimeVaryingMap.with_composite(make_map(FeasibleSet.ball([0.0, 0.0], 1.0), "euclidean"),
                                        CompositePart(kind="l1", weight=1.0), 1.0)
    np.testing.assert_allclose(grad_conjugate(phi, [3.0, 0.5]), [1.0, 0.0], atol=1e-9)


def test_disjoint_indicator_region_is_unsupported():
    phi = TimeVaryingMap.with_composite(make_map(FeasibleSet.cube(2, 1.0), "euclidean"),
                                        CompositePart(kind="indicator", region=FeasibleSet.ball([5.0, 5.0], 0.5)),
                                        1.0)
    with pytest.raises(Unsupported):
        grad_conjugate(phi, np.zeros(2))


def test_composite_with_zero_part_is_the_base_map():
    base = make_map(FeasibleSet.cube(2, 1.0), "euclidean")
    phi = TimeVaryingMap.with_composite(base, CompositePart(), weight=3.0)
    z = np.array([0.3, -2.0])
    assert np.array_equal(grad_conjugate(phi, z), grad_conjugate(base, z))


def test_composite_weight_must_not_decrease():
    base = make_map(FeasibleSet.cube(2, 1.0), "euclidean")
    phi = TimeVaryingMap.with_composite(base, CompositePart(kind="l1", weight=1.0), weight=2.0)
    with pytest.raises(ValueError):
        phi.with_weight(1.0)


def test_accumulating_map_needs_euclidean_base():
    with pytest.raises(Unsupported):
        TimeVaryingMap.accumulating(make_map(FeasibleSet.simplex(3), "entropy"), 1.0)


def test_soft_threshold():
    np.testing.assert_allclose(soft_threshold(np.array([2.0, -0.5, -3.0]), 1.0), [1.0, 0.0, -2.0])


def test_project_simplex():
    np.testing.assert_allclose(project_simplex(np.array([2.0, 0.0, 0.0])), [1.0, 0.0, 0.0])
    np.testing.assert_allclose(project_simplex(np.array([0.5, 0.5, 0.5])), np.full(3, 1.0 / 3.0))


def test_lmo_ties_break_to_lowest_index(simplex3):
    np.testing.assert_array_equal(simplex3.lmo(np.array([1.0, 0.0, 0.0])), [0.0, 1.0, 0.0])
    box = FeasibleSet.cube(2, 1.0)
    np.testing.assert_array_equal(box.lmo(np.array([1.0, -1.0])), [-1.0, 1.0])
    with pytest.raises(NoLMO):
        FeasibleSet.rn(2).lmo(np.ones(2))


def test_set_geometry(simplex3):
    assert simplex3.diameter() == pytest.approx(math.sqrt(2.0))
    assert FeasibleSet.cube(2, 1.0).vertices().shape == (4, 2)
    assert not FeasibleSet.rn(2).bounded


def test_max_value():
    assert make_map(FeasibleSet.cube(2, 1.0), "euclidean").max_value() == pytest.approx(1.0)
    assert make_map(FeasibleSet.simplex(4), "entropy").max_value() == pytest.approx(math.log(4.0))
    with pytest.raises(UnboundedSet):
        make_map(FeasibleSet.rn(2), "euclidean").max_value()


def test_entropy_map_needs_a_simplex():
    with pytest.raises(Unsupported):
        make_map(FeasibleSet.cube(2, 1.0), "entropy")


def test_product_map_splits_blocks():
    region = ProductSet([FeasibleSet.simplex(2), FeasibleSet.simplex(2)])
    map_ = make_map(region, "entropy")
    x = grad_conjugate(map_, [math.log(3.0), 0.0, 0.0, 0.0])
    np.testing.assert_allclose(x, [0.75, 0.25, 0.5, 0.5])
