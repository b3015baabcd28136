"""Regularizers phi and their conjugate-gradient oracles.

Every map is anchored so that phi >= 0 on its set, and every grad_conjugate
returns argmax_{x in X} <z, x> - phi(x).
"""
import logging
from typing import Optional, Sequence, Union

import numpy as np
from scipy.special import rel_entr, softmax

from dualgap.errors import DomainError, UnboundedSet, Unsupported
from dualgap.mirror_maps.sets import FeasibleSet, ProductSet

logger = logging.getLogger(__name__)

ENTROPY_FLOOR = 1e-300


class MirrorMap:
    """Base class for strongly convex regularizers on a feasible set."""

    kind = "base"
    norm = "l2"

    def __init__(self, feasible_set, scale: float = 1.0):
        if scale <= 0:
            raise ValueError(f"Map scale must be positive, got {scale}")
        self.feasible_set = feasible_set
        self.scale = float(scale)
        self.dim = feasible_set.dim

    @property
    def strong_convexity(self) -> float:
        return self.scale

    def value(self, x: np.ndarray) -> float:
        raise NotImplementedError

    def gradient(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def grad_conjugate(self, z: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def bregman(self, x: np.ndarray, y: np.ndarray) -> float:
        return float(self.value(x) - self.value(y) - np.dot(self.gradient(y), x - y))

    def max_value(self) -> float:
        """max of phi over the (bounded) set."""
        raise NotImplementedError

    def primal_norm(self, dx: np.ndarray) -> float:
        return float(np.linalg.norm(dx, 1 if self.norm == "l1" else 2))

    def dual_norm(self, g: np.ndarray) -> float:
        return float(np.linalg.norm(g, np.inf if self.norm == "l1" else 2))

    def conjugate(self, z: np.ndarray) -> float:
        x = self.grad_conjugate(z)
        return float(np.dot(z, x) - self.value(x))


class EuclideanMap(MirrorMap):
    """phi(x) = (scale/2) ||x - center||^2."""

    kind = "euclidean"
    norm = "l2"

    def __init__(self, feasible_set, scale: float = 1.0, center: Optional[Sequence[float]] = None):
        super().__init__(feasible_set, scale)
        if center is None:
            center = np.zeros(self.dim)
        self.center = np.array(center, dtype=float)
        if self.center.shape != (self.dim,):
            raise ValueError(f"Map center must have dimension {self.dim}")
        self.center.setflags(write=False)

    def value(self, x: np.ndarray) -> float:
        diff = np.asarray(x, dtype=float) - self.center
        return 0.5 * self.scale * float(np.dot(diff, diff))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.scale * (np.asarray(x, dtype=float) - self.center)

    def grad_conjugate(self, z: np.ndarray) -> np.ndarray:
        return self.feasible_set.project(self.center + np.asarray(z, dtype=float) / self.scale)

    def bregman(self, x: np.ndarray, y: np.ndarray) -> float:
        diff = np.asarray(x, dtype=float) - np.asarray(y, dtype=float)
        return 0.5 * self.scale * float(np.dot(diff, diff))

    def max_value(self) -> float:
        region = self.feasible_set
        if not region.bounded:
            raise UnboundedSet("max of a euclidean map over R^n is infinite")
        if region.kind == "box":
            far = np.maximum((region.lower - self.center) ** 2, (region.upper - self.center) ** 2)
            return 0.5 * self.scale * float(far.sum())
        if region.kind == "simplex":
            return max(self.value(vertex) for vertex in region.vertices())
        reach = np.linalg.norm(region.center - self.center) + region.radius
        return 0.5 * self.scale * float(reach ** 2)


class EntropyMap(MirrorMap):
    """phi(x) = scale * KL(x || center) on the probability simplex."""

    kind = "entropy"
    norm = "l1"

    def __init__(self, feasible_set, scale: float = 1.0, center: Optional[Sequence[float]] = None):
        if feasible_set.kind != "simplex":
            raise Unsupported(f"Entropy map needs a simplex, got '{feasible_set.kind}'")
        super().__init__(feasible_set, scale)
        if center is None:
            center = np.full(self.dim, 1.0 / self.dim)
        self.center = np.array(center, dtype=float)
        if self.center.shape != (self.dim,) or np.any(self.center <= 0):
            raise ValueError("Entropy center must be a strictly positive point of the simplex")
        self.center = self.center / self.center.sum()
        self.center.setflags(write=False)
        self._log_center = np.log(self.center)

    def value(self, x: np.ndarray) -> float:
        return self.scale * float(np.sum(rel_entr(np.asarray(x, dtype=float), self.center)))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        with np.errstate(divide="ignore"):
            return self.scale * (np.log(x) - self._log_center + 1.0)

    def grad_conjugate(self, z: np.ndarray) -> np.ndarray:
        return softmax(np.asarray(z, dtype=float) / self.scale + self._log_center)

    def bregman(self, x: np.ndarray, y: np.ndarray) -> float:
        y = np.asarray(y, dtype=float)
        if np.any(y < ENTROPY_FLOOR):
            raise DomainError("KL divergence needs strictly positive coordinates in y")
        return self.scale * float(np.sum(rel_entr(np.asarray(x, dtype=float), y)))

    def max_value(self) -> float:
        return self.scale * float(np.max(-self._log_center))


class ProductMap(MirrorMap):
    """Sum of per-block maps on a product set."""

    kind = "product"

    def __init__(self, maps: Sequence[MirrorMap]):
        self.maps = tuple(maps)
        feasible_set = ProductSet([m.feasible_set for m in self.maps])
        super().__init__(feasible_set, min(m.scale for m in self.maps))
        kinds = {m.norm for m in self.maps}
        self.norm = kinds.pop() if len(kinds) == 1 else "mixed"

    def _split(self, x):
        return self.feasible_set.split(x)

    def value(self, x: np.ndarray) -> float:
        return float(sum(m.value(part) for m, part in zip(self.maps, self._split(x))))

    def gradient(self, x: np.ndarray) -> np.ndarray:
        return self.feasible_set.join([m.gradient(part) for m, part in zip(self.maps, self._split(x))])

    def grad_conjugate(self, z: np.ndarray) -> np.ndarray:
        return self.feasible_set.join([m.grad_conjugate(part) for m, part in zip(self.maps, self._split(z))])

    def bregman(self, x: np.ndarray, y: np.ndarray) -> float:
        pairs = zip(self.maps, self._split(x), self._split(y))
        return float(sum(m.bregman(xp, yp) for m, xp, yp in pairs))

    def max_value(self) -> float:
        return float(sum(m.max_value() for m in self.maps))

    def primal_norm(self, dx: np.ndarray) -> float:
        parts = zip(self.maps, self._split(dx))
        return float(np.sqrt(sum(m.primal_norm(part) ** 2 for m, part in parts)))

    def dual_norm(self, g: np.ndarray) -> float:
        parts = zip(self.maps, self._split(g))
        return float(np.sqrt(sum(m.dual_norm(part) ** 2 for m, part in parts)))


def make_map(feasible_set: Union[FeasibleSet, ProductSet], kind: str = "euclidean",
             scale: float = 1.0, center: Optional[Sequence[float]] = None) -> MirrorMap:
    """Build a map by kind name; product sets get one block map per block."""
    if isinstance(feasible_set, ProductSet):
        centers = feasible_set.split(center) if center is not None else [None] * len(feasible_set.blocks)
        return ProductMap([make_map(block, kind, scale, c) for block, c in zip(feasible_set.blocks, centers)])
    builders = {
        "euclidean": EuclideanMap,
        "entropy": EntropyMap,
    }
    builder = builders.get(kind)
    if builder is None:
        raise Unsupported(f"Unknown map kind '{kind}', expected one of {sorted(builders)}")
    return builder(feasible_set, scale=scale, center=center)
