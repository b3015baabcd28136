"""Frank-Wolfe (generalized conditional gradient when psi is present)."""
from typing import Optional, Tuple

import numpy as np

from dualgap.errors import NoLMO
from dualgap.gap_tracker import Schedule, Step
from dualgap.problems import Objective
from dualgap.solvers.base import SolverHandler, SolverState, averaged, finite_gradient, make_step


class FrankWolfeHandler(SolverHandler):
    """x^(i) moves towards the vertex chosen at step i-1.

    v^(i) = argmin_u <grad f(x^(i)), u> + psi(u); the vertex and psi(v^(i))
    are recorded because both gap bounds read them.
    """

    tag = "fw"

    def validate(self) -> None:
        super().validate()
        if not getattr(self.objective.feasible_set, "bounded", False):
            raise NoLMO(f"Frank-Wolfe needs a bounded feasible set for {self.objective.name}")

    def vertex(self, grad: np.ndarray) -> np.ndarray:
        return self.objective.composite.lmo(self.objective.feasible_set, grad)

    def default_start(self) -> np.ndarray:
        return self.vertex(np.zeros(self.objective.dim))

    def correction(self, x_star: np.ndarray) -> float:
        return 0.0

    def _record(self, i: int, x: np.ndarray, previous_z: np.ndarray) -> Tuple[SolverState, Step]:
        grad = finite_gradient(self.objective, x)
        z = previous_z - self.schedule.a(i) * grad
        vertex = self.vertex(grad)
        step = make_step(i, self.schedule, self.objective, x, grad, z, x, self.map,
                         vertex=vertex, vertex_psi=self.objective.composite.value(vertex))
        return SolverState(i, x, x, z, self.map, {"vertex": vertex}), step

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        return self._record(0, self.start(x0), np.zeros(self.objective.dim))

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        x = averaged(state.x, state.aux["vertex"], self.schedule, i)
        return self._record(i, x, state.z)


def fw_step(state: SolverState, objective: Objective, map_, schedule: Schedule,
            i: int) -> Tuple[SolverState, Step]:
    return FrankWolfeHandler(objective, map_, schedule).step(state, i)
