"""Accelerated mirror descent for L-smooth objectives."""
from typing import Optional, Tuple

import numpy as np

from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import SmoothHandler, SolverState, averaged, finite_gradient, make_step


class AcceleratedMirrorDescentHandler(SmoothHandler):
    """Couples a mirror sequence with gradient steps.

    x^(i) averages x_hat^(i-1) with the mirror point grad phi*(z^(i-1));
    x_hat^(i) = Grad(x^(i)).
    """

    tag = "amd"

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        x = self.start(x0)
        grad = finite_gradient(self.objective, x)
        z = -self.schedule.a(0) * grad
        x_hat = self.grad_step(x, grad)
        step = make_step(0, self.schedule, self.objective, x, grad, z, x_hat, self.map, mirror=x)
        return SolverState(0, x, x_hat, z, self.map), step

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        mirror = grad_conjugate(self.map, state.z)
        x = averaged(state.x_hat, mirror, self.schedule, i)
        grad = finite_gradient(self.objective, x)
        z = state.z - self.schedule.a(i) * grad
        x_hat = self.grad_step(x, grad)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x_hat, self.map, mirror=mirror)
        return SolverState(i, x, x_hat, z, self.map), step


def amd_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
             i: int) -> Tuple[SolverState, Step]:
    return AcceleratedMirrorDescentHandler(objective, map_, schedule).step(state, i)
