import numpy as np
import pytest
import yaml

from dualgap.mirror_maps import FeasibleSet
from dualgap.problems import Constants, Objective, make_instance

QUADRATIC_2D = {"family": "quadratic", "diag": [1.0, 4.0], "b": [1.0, 4.0]}


def half_norm_squared(region) -> Objective:
    """f(x) = 1/2 ||x||^2 on ``region``."""
    return Objective(
        dim=region.dim,
        value=lambda x: 0.5 * float(np.dot(x, x)),
        gradient=lambda x: np.array(x, dtype=float),
        feasible_set=region,
        constants=Constants(smooth=1.0, strongly_convex=1.0, hoelder=(1.0, 1.0)),
        conjugate=lambda y: 0.5 * float(np.dot(y, y)),
        name="half-norm",
    )


@pytest.fixture
def quadratic():
    """diag(1, 4) quadratic with x* = (1, 1) and f* = -2.5."""
    return make_instance(QUADRATIC_2D)


@pytest.fixture
def scalar_quadratic():
    """f(x) = x^2 / 2 on the real line."""
    return make_instance({"family": "quadratic", "diag": [1.0], "b": [0.0]})


@pytest.fixture
def simplex3():
    return FeasibleSet.simplex(3)


@pytest.fixture
def write_config(tmp_path):
    """Write a raw experiment document and return its path."""

    def _write(raw, name="dualgap.yaml"):
        path = tmp_path / name
        path.write_text(yaml.dump(raw, default_flow_style=False, sort_keys=False), encoding="utf-8")
        return path

    return _write
