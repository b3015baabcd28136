"""Time-varying regularizers phi_t built on top of a base map.

Three modes:

* static:       phi_t = phi
* composite:    phi_t = A * psi + phi, with psi a simple convex term
* accumulation: phi_t = sum_j a_j (sigma/2) ||x - x_j||^2 + phi

Maps are immutable; ``with_weight`` and ``with_anchor`` return new maps.
Accumulation keeps sufficient statistics (sum a_j, sum a_j x_j,
sum a_j ||x_j||^2) instead of the full anchor list.
"""
import logging
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from dualgap.errors import Unsupported
from dualgap.mirror_maps.maps import EuclideanMap, MirrorMap
from dualgap.mirror_maps.sets import FeasibleSet

logger = logging.getLogger(__name__)

INNER_TOL = 1e-12
INNER_MAX_STEPS = 20_000

COMPOSITE_KINDS = ("zero", "l1", "indicator")
MODES = ("static", "composite", "accumulation")


def soft_threshold(x: np.ndarray, threshold: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - threshold, 0.0)


@dataclass(frozen=True)
class CompositePart:
    """Simple convex term psi added to a smooth objective."""

    kind: str = "zero"
    weight: float = 0.0
    region: Optional[FeasibleSet] = field(default=None, compare=False)

    def __post_init__(self):
        if self.kind not in COMPOSITE_KINDS:
            raise ValueError(f"Unknown composite kind '{self.kind}', expected one of {COMPOSITE_KINDS}")
        if self.kind == "l1" and self.weight < 0:
            raise ValueError(f"l1 weight must be nonnegative, got {self.weight}")
        if self.kind == "indicator" and self.region is None:
            raise ValueError("Indicator composite part needs a region")

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero" or (self.kind == "l1" and self.weight == 0.0)

    def value(self, x: np.ndarray) -> float:
        if self.kind == "zero":
            return 0.0
        if self.kind == "l1":
            return self.weight * float(np.sum(np.abs(x)))
        return 0.0 if self.region.contains(x, 1e-9) else float("inf")

    def subgradient(self, x: np.ndarray) -> np.ndarray:
        if self.kind == "l1":
            return self.weight * np.sign(x)
        return np.zeros_like(np.asarray(x, dtype=float))

    def lmo(self, feasible_set: FeasibleSet, g: np.ndarray) -> np.ndarray:
        """argmin over the set of <g, u> + psi(u)."""
        if self.kind == "zero":
            return feasible_set.lmo(g)
        if self.kind == "l1":
            if feasible_set.kind == "simplex":
                return feasible_set.lmo(g)
            if feasible_set.kind == "box":
                candidates = np.stack([
                    feasible_set.lower,
                    np.clip(0.0, feasible_set.lower, feasible_set.upper),
                    feasible_set.upper,
                ])
                costs = g * candidates + self.weight * np.abs(candidates)
                return candidates[np.argmin(costs, axis=0), np.arange(feasible_set.dim)]
        raise Unsupported(f"No composite LMO for psi='{self.kind}' on set '{feasible_set.kind}'")


class TimeVaryingMap:
    """phi_t in one of the three modes, sharing the MirrorMap interface."""

    def __init__(self, base: MirrorMap, mode: str = "static",
                 composite: Optional[CompositePart] = None, weight: float = 0.0,
                 sigma: float = 0.0, anchor_weight: float = 0.0,
                 anchor_sum: Optional[np.ndarray] = None, anchor_sq: float = 0.0,
                 anchor_count: int = 0):
        if mode not in MODES:
            raise ValueError(f"Unknown map mode '{mode}', expected one of {MODES}")
        if mode == "accumulation" and not isinstance(base, EuclideanMap):
            raise Unsupported("Strong-convexity accumulation needs a euclidean base map")
        self.base = base
        self.mode = mode
        self.composite = composite if composite is not None else CompositePart()
        self.weight = float(weight)
        self.sigma = float(sigma)
        self.anchor_weight = float(anchor_weight)
        self.anchor_sum = np.zeros(base.dim) if anchor_sum is None else np.asarray(anchor_sum, dtype=float)
        self.anchor_sq = float(anchor_sq)
        self.anchor_count = anchor_count
        self.feasible_set = base.feasible_set
        self.dim = base.dim
        self.norm = base.norm

    @classmethod
    def static(cls, base: MirrorMap) -> "TimeVaryingMap":
        return cls(base)

    @classmethod
    def with_composite(cls, base: MirrorMap, composite: CompositePart, weight: float = 0.0) -> "TimeVaryingMap":
        return cls(base, mode="composite", composite=composite, weight=weight)

    @classmethod
    def accumulating(cls, base: MirrorMap, sigma: float) -> "TimeVaryingMap":
        if sigma <= 0:
            raise ValueError(f"Accumulated strong convexity must be positive, got {sigma}")
        return cls(base, mode="accumulation", sigma=sigma)

    def with_weight(self, weight: float) -> "TimeVaryingMap":
        """Composite map with A replaced by ``weight``."""
        if weight < self.weight:
            raise ValueError("Composite weight must be nondecreasing")
        return TimeVaryingMap(self.base, self.mode, self.composite, weight)

    def with_anchor(self, a: float, x: np.ndarray) -> "TimeVaryingMap":
        """Accumulation map with the anchor (a, x) added."""
        x = np.asarray(x, dtype=float)
        return TimeVaryingMap(
            self.base, self.mode, self.composite, self.weight, self.sigma,
            anchor_weight=self.anchor_weight + a,
            anchor_sum=self.anchor_sum + a * x,
            anchor_sq=self.anchor_sq + a * float(np.dot(x, x)),
            anchor_count=self.anchor_count + 1,
        )

    @property
    def strong_convexity(self) -> float:
        if self.mode == "accumulation":
            return self.anchor_weight * self.sigma + self.base.scale
        return self.base.strong_convexity

    def _quadratic_center(self) -> np.ndarray:
        base = self.base
        return (self.sigma * self.anchor_sum + base.scale * base.center) / self.strong_convexity

    def value(self, x: np.ndarray) -> float:
        x = np.asarray(x, dtype=float)
        total = self.base.value(x)
        if self.mode == "composite" and self.weight > 0:
            total += self.weight * self.composite.value(x)
        elif self.mode == "accumulation":
            total += 0.5 * self.sigma * (
                self.anchor_weight * float(np.dot(x, x))
                - 2.0 * float(np.dot(x, self.anchor_sum))
                + self.anchor_sq
            )
        return total

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        grad = self.base.gradient(x)
        if self.mode == "composite" and self.weight > 0:
            grad = grad + self.weight * self.composite.subgradient(x)
        elif self.mode == "accumulation":
            grad = grad + self.sigma * (self.anchor_weight * x - self.anchor_sum)
        return grad

    def grad_conjugate(self, z: np.ndarray) -> np.ndarray:
        z = np.asarray(z, dtype=float)
        if self.mode == "static":
            return self.base.grad_conjugate(z)
        if self.mode == "accumulation":
            return self.feasible_set.project(self._quadratic_center() + z / self.strong_convexity)
        return self._composite_grad_conjugate(z)

    def _composite_grad_conjugate(self, z: np.ndarray) -> np.ndarray:
        base, part, region = self.base, self.composite, self.feasible_set
        if part.is_zero or self.weight == 0.0:
            return base.grad_conjugate(z)
        if part.kind == "l1" and region.kind == "simplex":
            # ||x||_1 = 1 on the simplex, so psi only shifts phi_t by a constant
            return base.grad_conjugate(z)
        if isinstance(base, EuclideanMap):
            if part.kind == "l1" and region.kind in ("rn", "box"):
                shifted = soft_threshold(base.center + z / base.scale, self.weight * part.weight / base.scale)
                return region.project(shifted)
            if part.kind == "indicator" and region.kind == "rn":
                return part.region.project(base.center + z / base.scale)
            return self._inner_solve(z)
        raise Unsupported(
            f"No conjugate oracle for {base.kind} map with psi='{part.kind}' on '{region.kind}'"
        )

    def _inner_solve(self, z: np.ndarray) -> np.ndarray:
        """Dykstra's proximal splitting for euclidean bases without a closed form.

        grad phi_t*(z) is the prox of (A/scale) psi + indicator(set) at
        center + z/scale; the two parts are applied alternately with the
        Dykstra corrections, so the limit is the prox of the sum.
        """
        base, part, region = self.base, self.composite, self.feasible_set
        if part.kind == "l1":
            threshold = self.weight * part.weight / base.scale

            def prox_part(v: np.ndarray) -> np.ndarray:
                return soft_threshold(v, threshold)
        else:
            prox_part = part.region.project
        x = base.center + z / base.scale
        p, q = np.zeros_like(x), np.zeros_like(x)
        for step in range(INNER_MAX_STEPS):
            y = prox_part(x + p)
            p = x + p - y
            x_next = region.project(y + q)
            q = y + q - x_next
            tol = INNER_TOL * (1.0 + float(np.linalg.norm(x_next)))
            converged = float(np.linalg.norm(x_next - x)) <= tol and float(np.linalg.norm(x_next - y)) <= tol
            x = x_next
            if converged:
                logger.debug("Inner conjugate solve converged after %d steps", step + 1)
                return x
        raise Unsupported(
            f"Inner conjugate solve for psi='{part.kind}' on '{region.kind}' "
            f"did not reach {INNER_TOL:g} in {INNER_MAX_STEPS} steps"
        )

    def conjugate(self, z: np.ndarray) -> float:
        x = self.grad_conjugate(z)
        return float(np.dot(z, x) - self.value(x))

    def bregman(self, x: np.ndarray, y: np.ndarray) -> float:
        x, y = np.asarray(x, dtype=float), np.asarray(y, dtype=float)
        if self.mode == "static":
            return self.base.bregman(x, y)
        if self.mode == "accumulation":
            diff = x - y
            return 0.5 * self.strong_convexity * float(np.dot(diff, diff))
        return float(self.value(x) - self.value(y) - np.dot(self.gradient(y), x - y))

    def max_value(self) -> float:
        if self.mode != "static":
            raise Unsupported("max_value is only defined for static maps")
        return self.base.max_value()

    def primal_norm(self, dx: np.ndarray) -> float:
        return self.base.primal_norm(dx)

    def dual_norm(self, g: np.ndarray) -> float:
        return self.base.dual_norm(g)


def as_time_varying(map_) -> TimeVaryingMap:
    if isinstance(map_, TimeVaryingMap):
        return map_
    return TimeVaryingMap.static(map_)
