"""Per-step records produced by the discrete solvers."""
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

import numpy as np

from dualgap.errors import MissingHistory
from dualgap.gap_tracker.schedule import Schedule


@dataclass(frozen=True)
class Step:
    """Everything the gap formulas read about step i.

    ``x`` is the point the gradient (or operator) was queried at, ``map``
    the regularizer phi_i in force after the step.
    """

    i: int
    a: float
    A: float
    x: np.ndarray
    grad: np.ndarray
    value: float
    psi_value: float
    z: np.ndarray
    x_hat: np.ndarray
    hat_value: float
    hat_psi: float
    map: Any
    extras: Dict[str, Any] = field(default_factory=dict)

    @property
    def hat_full(self) -> float:
        """f(x_hat) + psi(x_hat)."""
        return self.hat_value + self.hat_psi

    def extra(self, name: str):
        try:
            return self.extras[name]
        except KeyError:
            raise MissingHistory(f"Step {self.i} does not record '{name}'")


@dataclass
class History:
    """Ordered steps 0..k of one solver run."""

    setting: str
    schedule: Schedule
    steps: List[Step] = field(default_factory=list)

    def append(self, step: Step) -> None:
        if step.i != len(self.steps):
            raise ValueError(f"Expected step {len(self.steps)}, got {step.i}")
        self.steps.append(step)

    @property
    def k(self) -> int:
        return len(self.steps) - 1

    @property
    def last(self) -> Step:
        if not self.steps:
            raise MissingHistory("History is empty")
        return self.steps[-1]

    def __getitem__(self, i: int) -> Step:
        if i < 0 or i >= len(self.steps):
            raise MissingHistory(f"History has no step {i} (k={self.k})")
        return self.steps[i]

    def __len__(self) -> int:
        return len(self.steps)

    def __iter__(self) -> Iterator[Step]:
        return iter(self.steps)

    def upto(self, k: Optional[int] = None) -> List[Step]:
        k = self.k if k is None else k
        if k < 0 or k > self.k:
            raise MissingHistory(f"History has no step {k} (k={self.k})")
        return self.steps[:k + 1]

    def dual_aggregate(self, k: Optional[int] = None) -> np.ndarray:
        """-sum a_i grad_i, re-accumulated from the recorded gradients."""
        steps = self.upto(k)
        grads = np.array([s.grad for s in steps])
        weights = np.array([s.a for s in steps])
        return -(weights[:, None] * grads).sum(axis=0)
