"""Mirror descent in its dual-averaging form."""
from typing import Optional, Tuple

import numpy as np

from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import SolverHandler, SolverState, averaged, finite_gradient, make_step


class MirrorDescentHandler(SolverHandler):
    """x^(i) = grad phi*(z^(i-1)), z^(i) = z^(i-1) - a_i grad f(x^(i))."""

    tag = "md"

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        x = self.start(x0)
        grad = finite_gradient(self.objective, x)
        z = -self.schedule.a(0) * grad
        step = make_step(0, self.schedule, self.objective, x, grad, z, x, self.map)
        return SolverState(0, x, x, z, self.map), step

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        x = grad_conjugate(self.map, state.z)
        grad = finite_gradient(self.objective, x)
        z = state.z - self.schedule.a(i) * grad
        x_hat = averaged(state.x_hat, x, self.schedule, i)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x_hat, self.map)
        return SolverState(i, x, x_hat, z, self.map), step


def md_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
            i: int) -> Tuple[SolverState, Step]:
    return MirrorDescentHandler(objective, map_, schedule).step(state, i)
