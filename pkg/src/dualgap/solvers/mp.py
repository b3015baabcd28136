"""Mirror prox: an extrapolation step before each mirror step."""
from typing import Optional, Tuple

import numpy as np

from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import SolverHandler, SolverState, averaged, finite_gradient, make_step


class MirrorProxHandler(SolverHandler):
    """Two oracle calls per step.

    x~ = grad phi*(z^(i-1)), z~ = z^(i-1) - a_i g(x~), x^(i) = grad phi*(z~),
    then z^(i) = z^(i-1) - a_i g(x^(i)). The output averages the x^(i).
    """

    tag = "mp"

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        x = self.start(x0)
        grad = finite_gradient(self.objective, x)
        z = -self.schedule.a(0) * grad
        step = make_step(0, self.schedule, self.objective, x, grad, z, x, self.map)
        return SolverState(0, x, x, z, self.map), step

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        a = self.schedule.a(i)
        x_tilde = grad_conjugate(self.map, state.z)
        z_tilde = state.z - a * finite_gradient(self.objective, x_tilde)
        x = grad_conjugate(self.map, z_tilde)
        grad = finite_gradient(self.objective, x)
        z = state.z - a * grad
        x_hat = averaged(state.x_hat, x, self.schedule, i)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x_hat, self.map,
                         x_tilde=x_tilde, z_tilde=z_tilde)
        return SolverState(i, x, x_hat, z, self.map), step


def mp_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
            i: int) -> Tuple[SolverState, Step]:
    return MirrorProxHandler(objective, map_, schedule).step(state, i)
