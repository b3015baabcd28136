"""Shared solver state and the handler interface every method implements."""
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np

from dualgap.errors import IncompatibleConfiguration, NonFinite, NotSmooth
from dualgap.gap_tracker import Schedule, Step
from dualgap.mirror_maps import as_time_varying, grad_conjugate
from dualgap.problems import Objective


@dataclass(frozen=True)
class SolverState:
    """Iterate after step k.

    ``x`` is the last query point, ``x_hat`` the output point, ``z`` the
    aggregated negative gradients and ``map`` the regularizer in force.
    """

    k: int
    x: np.ndarray
    x_hat: np.ndarray
    z: np.ndarray
    map: Any
    aux: Dict[str, Any] = field(default_factory=dict)


def finite_gradient(objective: Objective, x: np.ndarray) -> np.ndarray:
    grad = np.asarray(objective.gradient(x), dtype=float)
    if not np.all(np.isfinite(grad)):
        raise NonFinite(f"Gradient of {objective.name} is not finite at {x}")
    return grad


def make_step(i: int, schedule: Schedule, objective: Objective, x: np.ndarray, grad: np.ndarray,
              z: np.ndarray, x_hat: np.ndarray, map_, **extras) -> Step:
    """Evaluate the values a gap record needs and package step i."""
    value = float(objective.value(x))
    if not np.isfinite(value):
        raise NonFinite(f"Value of {objective.name} is not finite at {x}")
    same_point = x_hat is x
    return Step(
        i=i,
        a=schedule.a(i),
        A=schedule.A(i),
        x=x,
        grad=grad,
        value=value,
        psi_value=objective.composite.value(x),
        z=z,
        x_hat=x_hat,
        hat_value=value if same_point else float(objective.value(x_hat)),
        hat_psi=objective.composite.value(x_hat),
        map=map_,
        extras=extras,
    )


def averaged(previous: np.ndarray, point: np.ndarray, schedule: Schedule, i: int) -> np.ndarray:
    """(A^(i-1) previous + a_i point) / A^(i)."""
    return (schedule.A(i - 1) * previous + schedule.a(i) * point) / schedule.A(i)


class SolverHandler:
    """Base class for the discrete methods.

    Subclasses set ``tag`` and implement ``initialize`` and ``step``; every
    step returns the new state together with the ``Step`` the tracker reads.
    """

    tag = "base"

    def __init__(self, objective: Objective, map_, schedule: Schedule):
        self.objective = objective
        self.map = as_time_varying(map_)
        self.schedule = schedule
        self.validate()

    def validate(self) -> None:
        if self.map.dim != self.objective.dim:
            raise IncompatibleConfiguration(
                f"Map dimension {self.map.dim} does not match problem dimension {self.objective.dim}"
            )

    def default_start(self) -> np.ndarray:
        """grad phi*(0), the minimizer of the regularizer."""
        return grad_conjugate(self.map, np.zeros(self.objective.dim))

    def start(self, x0: Optional[np.ndarray]) -> np.ndarray:
        if x0 is None:
            return self.default_start()
        x0 = np.asarray(x0, dtype=float)
        if not self.objective.feasible_set.contains(x0, 1e-9):
            raise IncompatibleConfiguration(f"Initial point {x0} is not feasible")
        return x0

    @property
    def regularizer(self):
        """The static phi the lower bound subtracts at x*."""
        return self.map.base

    def correction(self, x_star: np.ndarray) -> float:
        """phi(x*), subtracted in the lower bound."""
        return float(self.regularizer.value(x_star))

    def initialize(self, x0: Optional[np.ndarray] = None) -> Tuple[SolverState, Step]:
        raise NotImplementedError

    def step(self, state: SolverState, i: int) -> Tuple[SolverState, Step]:
        raise NotImplementedError


class SmoothHandler(SolverHandler):
    """Methods finishing each iteration with the gradient step Grad(x)."""

    def validate(self) -> None:
        super().validate()
        if not self.objective.constants.smooth:
            raise NotSmooth(f"'{self.tag}' needs a smoothness constant for {self.objective.name}")
        self.smooth = float(self.objective.constants.smooth)

    def grad_step(self, x: np.ndarray, grad: np.ndarray) -> np.ndarray:
        """argmin over the set of <grad, y - x> + (L/2)||y - x||^2."""
        return self.objective.feasible_set.project(x - grad / self.smooth)
