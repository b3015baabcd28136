"""Gradient descent written as lazy dual averaging with a euclidean map."""
from typing import Optional, Tuple

import numpy as np

from dualgap.errors import IncompatibleConfiguration, InvariantViolation, Unsupported
from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import EuclideanMap, grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import SmoothHandler, SolverState, finite_gradient, make_step

EQUIVALENCE_TOL = 1e-12


class GradientDescentHandler(SmoothHandler):
    """x^(i) = x^(0) + z^(i-1)/sigma on R^n; the output is x^(k+1).

    Each step is checked against the classical update x - (a_i/sigma) g.
    """

    tag = "gd"

    def validate(self) -> None:
        super().validate()
        if getattr(self.objective.feasible_set, "kind", None) != "rn":
            raise Unsupported("Gradient descent is tracked on R^n only; use amd for constrained sets")
        if not isinstance(self.map.base, EuclideanMap) or self.map.mode != "static":
            raise IncompatibleConfiguration("Gradient descent needs a static euclidean map")
        self.sigma = self.map.strong_convexity

    def start(self, x0: Optional[np.ndarray]) -> np.ndarray:
        center = self.map.base.center
        if x0 is not None and not np.allclose(x0, center, rtol=0.0, atol=1e-12):
            raise IncompatibleConfiguration("Gradient descent starts at the map center")
        return np.array(center, dtype=float)

    def _check_equivalence(self, i: int, x: np.ndarray, grad: np.ndarray, x_next: np.ndarray) -> None:
        classical = x - self.schedule.a(i) / self.sigma * grad
        drift = float(np.linalg.norm(x_next - classical))
        if drift > EQUIVALENCE_TOL * (1.0 + float(np.linalg.norm(x))):
            raise InvariantViolation(i, "gd-equivalence", f"lazy and classical iterates differ by {drift:.3g}")

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        x = self.start(x0)
        grad = finite_gradient(self.objective, x)
        z = -self.schedule.a(0) * grad
        x_next = grad_conjugate(self.map, z)
        self._check_equivalence(0, x, grad, x_next)
        step = make_step(0, self.schedule, self.objective, x, grad, z, x_next, self.map)
        return SolverState(0, x, x_next, z, self.map), step

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        x = state.x_hat
        grad = finite_gradient(self.objective, x)
        z = state.z - self.schedule.a(i) * grad
        x_next = grad_conjugate(self.map, z)
        self._check_equivalence(i, x, grad, x_next)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x_next, self.map)
        return SolverState(i, x, x_next, z, self.map), step


def gd_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
            i: int) -> Tuple[SolverState, Step]:
    return GradientDescentHandler(objective, map_, schedule).step(state, i)
