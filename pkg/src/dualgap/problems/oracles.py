"""Oracle types: objectives, monotone operators, saddle problems, ground truth."""
from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from dualgap.errors import EmptyProbeSet
from dualgap.mirror_maps import CompositePart, ProductSet

Vector = np.ndarray


@dataclass(frozen=True)
class Constants:
    """Certified constants; None means the property is not claimed."""

    lipschitz: Optional[float] = None
    smooth: Optional[float] = None
    strongly_convex: Optional[float] = None
    hoelder: Optional[Tuple[float, float]] = None

    @property
    def condition(self) -> Optional[float]:
        if self.smooth is None or not self.strongly_convex:
            return None
        return self.smooth / self.strongly_convex


@dataclass(frozen=True)
class Objective:
    """f with value/gradient oracles on a feasible set, plus an optional psi."""

    dim: int
    value: Callable[[Vector], float]
    gradient: Callable[[Vector], Vector]
    feasible_set: object
    constants: Constants = field(default_factory=Constants)
    composite: CompositePart = field(default_factory=CompositePart)
    conjugate: Optional[Callable[[Vector], float]] = None
    name: str = "objective"

    def full_value(self, x: Vector) -> float:
        """f(x) + psi(x)."""
        return float(self.value(x)) + self.composite.value(x)

    @property
    def is_composite(self) -> bool:
        return not self.composite.is_zero


@dataclass(frozen=True)
class MonotoneOp:
    """Monotone operator F on a feasible set."""

    dim: int
    operator: Callable[[Vector], Vector]
    feasible_set: object
    smooth: Optional[float] = None
    smooth_l1: Optional[float] = None
    bound: Optional[float] = None
    name: str = "operator"

    def smooth_for(self, norm: str) -> Optional[float]:
        """Smoothness constant w.r.t. the norm a map measures distances in."""
        return self.smooth_l1 if norm == "l1" else self.smooth

    @classmethod
    def from_objective(cls, objective: Objective) -> "MonotoneOp":
        return cls(
            dim=objective.dim,
            operator=objective.gradient,
            feasible_set=objective.feasible_set,
            smooth=objective.constants.smooth,
            bound=objective.constants.lipschitz,
            name=f"grad({objective.name})",
        )


@dataclass(frozen=True)
class SaddleProblem:
    """Convex-concave Phi(v, w) on V x W."""

    v_set: object
    w_set: object
    value: Callable[[Vector, Vector], float]
    grad_v: Callable[[Vector, Vector], Vector]
    grad_w: Callable[[Vector, Vector], Vector]
    smooth: Optional[float] = None
    smooth_l1: Optional[float] = None
    name: str = "saddle"
    # Phi affine in each argument; F is then affine too
    bilinear: bool = False

    @property
    def feasible_set(self) -> ProductSet:
        return ProductSet([self.v_set, self.w_set])

    def split(self, x: Vector) -> Tuple[Vector, Vector]:
        v, w = self.feasible_set.split(x)
        return v, w

    def operator(self) -> MonotoneOp:
        """Induced operator F(v, w) = [grad_v Phi, -grad_w Phi]."""
        product = self.feasible_set

        def induced(x: Vector) -> Vector:
            v, w = product.split(x)
            return np.concatenate([self.grad_v(v, w), -self.grad_w(v, w)])

        return MonotoneOp(
            dim=product.dim,
            operator=induced,
            feasible_set=product,
            smooth=self.smooth,
            smooth_l1=self.smooth_l1,
            name=f"F({self.name})",
        )

    def primal_dual_gap(self, v_bar: Vector, w_bar: Vector, v: Vector, w: Vector) -> float:
        """Phi(v_bar, w) - Phi(v, w_bar)."""
        return float(self.value(v_bar, w) - self.value(v, w_bar))


@dataclass(frozen=True)
class GroundTruth:
    x_star: Vector
    f_star: float
    method: str

    def __post_init__(self):
        if self.method not in ("closed-form", "reference-solve"):
            raise ValueError(f"Unknown ground-truth method '{self.method}'")


def restricted_vi_gap(op: MonotoneOp, x_hat: Vector, probes: Sequence[Vector]) -> float:
    """max over probes u of <F(u), x_hat - u>."""
    if len(probes) == 0:
        raise EmptyProbeSet("Restricted VI gap needs at least one probe")
    x_hat = np.asarray(x_hat, dtype=float)
    return max(float(np.dot(op.operator(u), x_hat - u)) for u in np.asarray(probes, dtype=float))
