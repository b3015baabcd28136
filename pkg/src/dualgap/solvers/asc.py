"""Accelerated method for smooth strongly convex objectives.

The regularizer accumulates sigma/2 ||x - x^(j)||^2 for every query point,
so the strong convexity of f is folded into phi_i. Two variants: the
constrained one evaluates the mirror point with phi_(i-1), the
unconstrained one solves the implicit step on R^n in closed form.
"""
from typing import Optional, Tuple

import numpy as np

from dualgap.errors import IncompatibleConfiguration, NotStronglyConvex
from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import EuclideanMap, TimeVaryingMap, grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import SmoothHandler, SolverState, averaged, finite_gradient, make_step

SCALE_TOL = 1e-12


class StronglyConvexHandler(SmoothHandler):
    tag = "asc"

    def validate(self) -> None:
        super().validate()
        sigma = self.objective.constants.strongly_convex
        if not sigma or sigma <= 0:
            raise NotStronglyConvex(f"'{self.tag}' needs a strong convexity constant for {self.objective.name}")
        self.sigma = float(sigma)
        base = self.map.base
        if not isinstance(base, EuclideanMap) or self.map.mode != "static":
            raise IncompatibleConfiguration(f"'{self.tag}' needs a static euclidean base map")
        needed = self.smooth - self.sigma
        if needed > 0 and base.scale < needed * (1.0 - SCALE_TOL):
            raise IncompatibleConfiguration(
                f"Base map scale {base.scale:g} is below L - sigma = {needed:g}"
            )
        # geometric schedules may start at a_0 = c; phi is scaled with them
        normalization = 1.0
        if self.schedule.kind in ("asc", "asc-unconstrained"):
            normalization = float(self.schedule.params.get("normalization", 1.0))
        self._regularizer = base
        if normalization != 1.0:
            self._regularizer = EuclideanMap(base.feasible_set, base.scale * normalization, base.center)
        self.accumulating = TimeVaryingMap.accumulating(self._regularizer, self.sigma)

    @property
    def regularizer(self):
        return self._regularizer

    def default_start(self) -> np.ndarray:
        return self.objective.feasible_set.project(self.map.base.center)

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        x = self.start(x0)
        grad = finite_gradient(self.objective, x)
        z = -self.schedule.a(0) * grad
        map_ = self.accumulating.with_anchor(self.schedule.a(0), x)
        x_hat = self.grad_step(x, grad)
        step = make_step(0, self.schedule, self.objective, x, grad, z, x_hat, map_, mirror=x)
        return SolverState(0, x, x_hat, z, map_), step

    def query_point(self, state: SolverState, i: int) -> Tuple[np.ndarray, np.ndarray]:
        mirror = grad_conjugate(state.map, state.z)
        return averaged(state.x_hat, mirror, self.schedule, i), mirror

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        x, mirror = self.query_point(state, i)
        grad = finite_gradient(self.objective, x)
        a = self.schedule.a(i)
        z = state.z - a * grad
        map_ = state.map.with_anchor(a, x)
        x_hat = self.grad_step(x, grad)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x_hat, map_, mirror=mirror)
        return SolverState(i, x, x_hat, z, map_), step


class UnconstrainedStronglyConvexHandler(StronglyConvexHandler):
    """Implicit variant on R^n: the mirror point sees the anchor it creates."""

    tag = "asc-unconstrained"

    def validate(self) -> None:
        super().validate()
        if getattr(self.objective.feasible_set, "kind", None) != "rn":
            raise IncompatibleConfiguration("The unconstrained variant needs the feasible set R^n")

    def query_point(self, state: SolverState, i: int) -> Tuple[np.ndarray, np.ndarray]:
        a, A_prev, A = self.schedule.a(i), self.schedule.A(i - 1), self.schedule.A(i)
        base, sigma = self._regularizer, self.sigma
        offset = state.z + sigma * state.map.anchor_sum + base.scale * base.center
        curvature = A * sigma + base.scale - sigma * a * a / A
        mirror = (offset + sigma * (a * A_prev / A) * state.x_hat) / curvature
        return averaged(state.x_hat, mirror, self.schedule, i), mirror


def asc_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
             i: int) -> Tuple[SolverState, Step]:
    handler_type = StronglyConvexHandler
    if schedule.kind == "asc-unconstrained":
        handler_type = UnconstrainedStronglyConvexHandler
    return handler_type(objective, map_, schedule).step(state, i)
