"""Composite mirror descent: psi enters the regularizer with weight A^(i)."""
from typing import Optional, Tuple

import numpy as np

from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import TimeVaryingMap, grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import SolverHandler, SolverState, averaged, finite_gradient, make_step


class CompositeMirrorDescentHandler(SolverHandler):
    """Mirror descent with phi_i = phi + A^(i) psi.

    With psi = 0 every iterate coincides with plain mirror descent.
    """

    tag = "cmd"

    def validate(self) -> None:
        super().validate()
        self.composite_map = TimeVaryingMap.with_composite(self.map.base, self.objective.composite)

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        x = self.start(x0)
        grad = finite_gradient(self.objective, x)
        z = -self.schedule.a(0) * grad
        map_ = self.composite_map.with_weight(self.schedule.A(0))
        step = make_step(0, self.schedule, self.objective, x, grad, z, x, map_)
        return SolverState(0, x, x, z, map_), step

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        map_ = state.map.with_weight(self.schedule.A(i))
        x = grad_conjugate(map_, state.z)
        grad = finite_gradient(self.objective, x)
        z = state.z - self.schedule.a(i) * grad
        x_hat = averaged(state.x_hat, x, self.schedule, i)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x_hat, map_)
        return SolverState(i, x, x_hat, z, map_), step


def cmd_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
             i: int) -> Tuple[SolverState, Step]:
    return CompositeMirrorDescentHandler(objective, map_, schedule).step(state, i)
