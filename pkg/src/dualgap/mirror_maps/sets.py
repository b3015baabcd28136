"""Feasible sets: membership, euclidean projection and linear minimization."""
import itertools
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from dualgap.errors import NoLMO, Unsupported, UnboundedSet

MEMBERSHIP_TOL = 1e-12
MAX_ENUMERATED_VERTICES = 1024

SET_KINDS = ("rn", "simplex", "box", "ball")


def _frozen(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


def project_simplex(v: np.ndarray) -> np.ndarray:
    """Euclidean projection onto the probability simplex (sort-based)."""
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - 1.0
    ind = np.arange(1, v.size + 1)
    rho = np.count_nonzero(u - cssv / ind > 0)
    theta = cssv[rho - 1] / rho
    return np.maximum(v - theta, 0.0)


@dataclass(frozen=True)
class FeasibleSet:
    """A closed convex set X in one of four closed-form families.

    Use the ``rn``, ``simplex``, ``box`` and ``ball`` constructors rather
    than the raw dataclass.
    """

    kind: str
    dim: int
    lower: Optional[np.ndarray] = field(default=None, compare=False)
    upper: Optional[np.ndarray] = field(default=None, compare=False)
    center: Optional[np.ndarray] = field(default=None, compare=False)
    radius: Optional[float] = None

    def __post_init__(self):
        if self.kind not in SET_KINDS:
            raise ValueError(f"Unknown set kind '{self.kind}', expected one of {SET_KINDS}")
        if self.dim < 1:
            raise ValueError(f"Set dimension must be positive, got {self.dim}")
        if self.kind == "box":
            if self.lower is None or self.upper is None:
                raise ValueError("Box needs lower and upper bounds")
            if self.lower.shape != (self.dim,) or self.upper.shape != (self.dim,):
                raise ValueError("Box bounds must match the dimension")
            if not np.all(self.lower < self.upper):
                raise ValueError("Box needs lower[j] < upper[j] for every j")
        if self.kind == "ball":
            if self.radius is None or self.radius <= 0:
                raise ValueError(f"Ball radius must be positive, got {self.radius}")
            if self.center is None or self.center.shape != (self.dim,):
                raise ValueError("Ball center must match the dimension")

    @classmethod
    def rn(cls, dim: int) -> "FeasibleSet":
        return cls(kind="rn", dim=dim)

    @classmethod
    def simplex(cls, dim: int) -> "FeasibleSet":
        return cls(kind="simplex", dim=dim)

    @classmethod
    def box(cls, lower: Sequence[float], upper: Sequence[float]) -> "FeasibleSet":
        lower, upper = _frozen(lower), _frozen(upper)
        return cls(kind="box", dim=lower.size, lower=lower, upper=upper)

    @classmethod
    def cube(cls, dim: int, half_width: float = 1.0) -> "FeasibleSet":
        return cls.box(-half_width * np.ones(dim), half_width * np.ones(dim))

    @classmethod
    def ball(cls, center: Sequence[float], radius: float) -> "FeasibleSet":
        center = _frozen(center)
        return cls(kind="ball", dim=center.size, center=center, radius=float(radius))

    @property
    def bounded(self) -> bool:
        return self.kind != "rn"

    @property
    def blocks(self) -> Tuple["FeasibleSet", ...]:
        return (self,)

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,) or not np.all(np.isfinite(x)):
            return False
        if self.kind == "rn":
            return True
        if self.kind == "simplex":
            return bool(np.all(x >= -tol) and abs(x.sum() - 1.0) <= tol * max(1, self.dim))
        if self.kind == "box":
            return bool(np.all(x >= self.lower - tol) and np.all(x <= self.upper + tol))
        return bool(np.linalg.norm(x - self.center) <= self.radius + tol)

    def project(self, x: np.ndarray) -> np.ndarray:
        """Euclidean projection onto the set."""
        x = np.asarray(x, dtype=float)
        if self.kind == "rn":
            return x.copy()
        if self.kind == "simplex":
            return project_simplex(x)
        if self.kind == "box":
            return np.clip(x, self.lower, self.upper)
        offset = x - self.center
        norm = np.linalg.norm(offset)
        if norm <= self.radius:
            return x.copy()
        return self.center + offset * (self.radius / norm)

    def lmo(self, g: np.ndarray) -> np.ndarray:
        """Point of the set minimizing <g, u>; ties go to the lowest index."""
        g = np.asarray(g, dtype=float)
        if self.kind == "rn":
            raise NoLMO("Linear minimization over all of R^n is unbounded")
        if self.kind == "simplex":
            vertex = np.zeros(self.dim)
            vertex[int(np.argmin(g))] = 1.0
            return vertex
        if self.kind == "box":
            return np.where(g >= 0, self.lower, self.upper).astype(float)
        norm = np.linalg.norm(g)
        if norm == 0:
            return self.center.copy()
        return self.center - self.radius * g / norm

    def vertices(self) -> np.ndarray:
        """Extreme points, one per row, for polytopes of moderate size."""
        if self.kind == "simplex":
            return np.eye(self.dim)
        if self.kind == "box":
            if 2 ** self.dim > MAX_ENUMERATED_VERTICES:
                raise Unsupported(f"Box in dimension {self.dim} has too many vertices to enumerate")
            corners = itertools.product(*zip(self.lower, self.upper))
            return np.array(list(corners), dtype=float)
        raise Unsupported(f"Set kind '{self.kind}' has no finite vertex set")

    def diameter(self) -> float:
        """Euclidean diameter."""
        if self.kind == "rn":
            raise UnboundedSet("R^n has infinite diameter")
        if self.kind == "simplex":
            return float(np.sqrt(2.0)) if self.dim > 1 else 0.0
        if self.kind == "box":
            return float(np.linalg.norm(self.upper - self.lower))
        return 2.0 * self.radius

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        """n feasible points, one per row."""
        if self.kind == "rn":
            return rng.standard_normal((n, self.dim))
        if self.kind == "simplex":
            return rng.dirichlet(np.ones(self.dim), size=n)
        if self.kind == "box":
            return self.lower + (self.upper - self.lower) * rng.random((n, self.dim))
        directions = rng.standard_normal((n, self.dim))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self.radius * rng.random(n) ** (1.0 / self.dim)
        return self.center + directions * radii[:, None]

    def split(self, x: np.ndarray) -> List[np.ndarray]:
        return [np.asarray(x, dtype=float)]


class ProductSet:
    """Cartesian product of feasible sets, e.g. V x W for saddle problems."""

    kind = "product"

    def __init__(self, blocks: Sequence[FeasibleSet]):
        if not blocks:
            raise ValueError("Product set needs at least one block")
        self._blocks = tuple(blocks)
        self.dim = sum(block.dim for block in self._blocks)
        self._offsets = np.cumsum([0] + [block.dim for block in self._blocks])

    @property
    def blocks(self) -> Tuple[FeasibleSet, ...]:
        return self._blocks

    @property
    def bounded(self) -> bool:
        return all(block.bounded for block in self._blocks)

    def split(self, x: np.ndarray) -> List[np.ndarray]:
        x = np.asarray(x, dtype=float)
        return [x[start:stop] for start, stop in zip(self._offsets[:-1], self._offsets[1:])]

    def join(self, parts: Sequence[np.ndarray]) -> np.ndarray:
        return np.concatenate([np.asarray(part, dtype=float) for part in parts])

    def contains(self, x: np.ndarray, tol: float = MEMBERSHIP_TOL) -> bool:
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        return all(block.contains(part, tol) for block, part in zip(self._blocks, self.split(x)))

    def project(self, x: np.ndarray) -> np.ndarray:
        return self.join([block.project(part) for block, part in zip(self._blocks, self.split(x))])

    def lmo(self, g: np.ndarray) -> np.ndarray:
        return self.join([block.lmo(part) for block, part in zip(self._blocks, self.split(g))])

    def vertices(self) -> np.ndarray:
        per_block = [block.vertices() for block in self._blocks]
        total = int(np.prod([len(v) for v in per_block]))
        if total > MAX_ENUMERATED_VERTICES:
            raise Unsupported(f"Product set has {total} vertices, too many to enumerate")
        return np.array([np.concatenate(combo) for combo in itertools.product(*per_block)])

    def diameter(self) -> float:
        return float(np.sqrt(sum(block.diameter() ** 2 for block in self._blocks)))

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        return np.hstack([block.sample(rng, n) for block in self._blocks])
