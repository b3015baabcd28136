"""Right-hand sides of the continuous-time dynamics and their gap bounds.

Each class packs its ODE state into one flat vector. Dynamics driven by
x = grad phi_t*(z) integrate z only and rebuild x pointwise.
"""
from typing import Dict, Optional

import numpy as np

from dualgap.continuous.alpha import AlphaSpec
from dualgap.errors import (
    IncompatibleConfiguration,
    NoLMO,
    NotSmooth,
    NotStronglyConvex,
    Unsupported,
    UnknownSetting,
)
from dualgap.mirror_maps import EuclideanMap, TimeVaryingMap, as_time_varying, conjugate, grad_conjugate
from dualgap.problems import Objective
from dualgap.solvers.base import finite_gradient

FEASIBILITY_TOL = 1e-8

SCALAR_INTEGRALS = ("f", "lin", "psi", "sq", "fw_lower", "vertex_psi")
VECTOR_INTEGRALS = ("x", "vertex")


class Dynamics:
    """Base class: one subclass per continuous-time method."""

    tag = "base"
    needs_smooth = True

    def __init__(self, objective: Objective, map_, alpha: AlphaSpec):
        self.objective = objective
        self.map = as_time_varying(map_)
        self.base = self.map.base
        self.alpha = alpha
        self.dim = objective.dim
        self.validate()

    def validate(self) -> None:
        if self.map.dim != self.dim:
            raise IncompatibleConfiguration(f"Map dimension {self.map.dim} does not match problem dimension {self.dim}")
        if self.needs_smooth and not self.objective.constants.smooth:
            raise NotSmooth(f"'{self.tag}' needs a continuously differentiable objective")

    def default_start(self) -> np.ndarray:
        return grad_conjugate(self.base, np.zeros(self.dim))

    def start(self, x0: Optional[np.ndarray]) -> np.ndarray:
        if x0 is None:
            return self.default_start()
        x0 = np.asarray(x0, dtype=float)
        if not self.objective.feasible_set.contains(x0, FEASIBILITY_TOL):
            raise IncompatibleConfiguration(f"Initial point {x0} is not feasible")
        return x0

    def correction(self, x_star: np.ndarray) -> float:
        return float(self.base.value(x_star))

    def blocks(self, y: np.ndarray):
        n = self.dim
        return [y[i:i + n] for i in range(0, y.size, n)]

    def regularizer(self, t: float, y: np.ndarray, anchor_sq: float = 0.0):
        """phi_t in force at time t."""
        return self.map

    def initial_state(self, x0: Optional[np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def point(self, t: float, y: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def output(self, t: float, y: np.ndarray) -> np.ndarray:
        return self.point(t, y)

    def dual(self, y: np.ndarray) -> np.ndarray:
        return self.blocks(y)[0]

    def vertex(self, grad: np.ndarray) -> Optional[np.ndarray]:
        return None

    def feasible(self, t: float, y: np.ndarray) -> bool:
        if not np.all(np.isfinite(y)):
            return False
        region = self.objective.feasible_set
        return region.contains(self.point(t, y), FEASIBILITY_TOL) and region.contains(self.output(t, y), FEASIBILITY_TOL)

    def sample(self, t: float, y: np.ndarray) -> Dict[str, object]:
        """Integrands of every quadrature at (t, y)."""
        x = self.point(t, y)
        grad = finite_gradient(self.objective, x)
        value = float(self.objective.value(x))
        composite = self.objective.composite
        sample = {
            "x": x,
            "grad": grad,
            "f": value,
            "lin": value - float(np.dot(grad, x)),
            "psi": composite.value(x),
            "sq": float(np.dot(x, x)),
            "fw_lower": 0.0,
            "vertex_psi": 0.0,
            "vertex": np.zeros(self.dim),
        }
        vertex = self.vertex(grad)
        if vertex is not None:
            vertex_psi = composite.value(vertex)
            sample["vertex"] = vertex
            sample["vertex_psi"] = vertex_psi
            sample["fw_lower"] = value + float(np.dot(grad, vertex - x)) + vertex_psi
        return sample

    def scaled_upper(self, t: float, y: np.ndarray, integrals: Dict[str, object], start_value: float,
                     start_psi: float) -> float:
        """alpha(t) U(t)."""
        x = self.output(t, y)
        return self.alpha.value(t) * self.objective.full_value(x)

    def scaled_lower(self, t: float, y: np.ndarray, integrals: Dict[str, object], correction: float,
                     f_star: float) -> float:
        """alpha(t) L(t), with the alpha(0) f* term included."""
        regularizer = self.regularizer(t, y, integrals["sq"])
        return (integrals["lin"] - conjugate(regularizer, self.dual(y)) - correction
                + self.alpha.alpha0 * f_star)


class MirrorDynamics(Dynamics):
    """z' = -alpha' grad f(x), x = grad phi*(z), x_hat averages x."""

    tag = "ct-md"
    needs_smooth = False

    def initial_state(self, x0: Optional[np.ndarray]) -> np.ndarray:
        start = self.default_start()
        if x0 is not None and not np.allclose(x0, start, rtol=0.0, atol=1e-12):
            raise IncompatibleConfiguration(f"'{self.tag}' starts at grad phi*(0) = {start}")
        return np.concatenate([np.zeros(self.dim), start])

    def point(self, t: float, y: np.ndarray) -> np.ndarray:
        return grad_conjugate(self.regularizer(t, y), self.dual(y))

    def output(self, t: float, y: np.ndarray) -> np.ndarray:
        return self.blocks(y)[1]

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        _, x_hat = self.blocks(y)
        x = self.point(t, y)
        grad = finite_gradient(self.objective, x)
        rate = self.alpha.derivative(t)
        return np.concatenate([-rate * grad, rate * (x - x_hat) / self.alpha.value(t)])

    def scaled_upper(self, t, y, integrals, start_value, start_psi) -> float:
        return self.alpha.alpha0 * (start_value + start_psi) + integrals["f"] + integrals["psi"]


class CompositeDynamics(MirrorDynamics):
    """Mirror dynamics with phi_t = phi + A(t) psi."""

    tag = "ct-cmd"

    def regularizer(self, t: float, y: np.ndarray, anchor_sq: float = 0.0):
        return TimeVaryingMap.with_composite(self.base, self.objective.composite, self.alpha.A(t))


class GradientFlowDynamics(Dynamics):
    """x = x(0) + z/sigma on R^n: gradient flow with a time change."""

    tag = "ct-gd"

    def validate(self) -> None:
        super().validate()
        if getattr(self.objective.feasible_set, "kind", None) != "rn":
            raise Unsupported("Gradient flow is tracked on R^n only")
        if not isinstance(self.base, EuclideanMap) or self.map.mode != "static":
            raise IncompatibleConfiguration("Gradient flow needs a static euclidean map")

    def initial_state(self, x0: Optional[np.ndarray]) -> np.ndarray:
        if x0 is not None and not np.allclose(x0, self.base.center, rtol=0.0, atol=1e-12):
            raise IncompatibleConfiguration("Gradient flow starts at the map center")
        return np.zeros(self.dim)

    def point(self, t: float, y: np.ndarray) -> np.ndarray:
        return grad_conjugate(self.map, y)

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        grad = finite_gradient(self.objective, self.point(t, y))
        return -self.alpha.derivative(t) * grad


class AcceleratedDynamics(Dynamics):
    """x' = alpha' (grad phi_t*(z) - x) / alpha."""

    tag = "ct-amd"

    def initial_state(self, x0: Optional[np.ndarray]) -> np.ndarray:
        return np.concatenate([np.zeros(self.dim), self.start(x0)])

    def point(self, t: float, y: np.ndarray) -> np.ndarray:
        return self.blocks(y)[1]

    def mirror(self, t: float, y: np.ndarray) -> np.ndarray:
        return grad_conjugate(self.regularizer(t, y), self.dual(y))

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        x = self.point(t, y)
        grad = finite_gradient(self.objective, x)
        rate = self.alpha.derivative(t)
        return np.concatenate([-rate * grad, rate * (self.mirror(t, y) - x) / self.alpha.value(t)])


class StronglyConvexDynamics(AcceleratedDynamics):
    """Accelerated dynamics with phi_t = phi + integral of sigma/2 ||. - x(tau)||^2 d alpha.

    The state carries the anchor sum S(t) = integral of x d alpha as a third block.
    """

    tag = "ct-asc"

    def validate(self) -> None:
        super().validate()
        sigma = self.objective.constants.strongly_convex
        if not sigma or sigma <= 0:
            raise NotStronglyConvex(f"'{self.tag}' needs a strong convexity constant")
        if not isinstance(self.base, EuclideanMap) or self.map.mode != "static":
            raise IncompatibleConfiguration(f"'{self.tag}' needs a static euclidean base map")
        self.sigma = float(sigma)

    def initial_state(self, x0: Optional[np.ndarray]) -> np.ndarray:
        return np.concatenate([super().initial_state(x0), np.zeros(self.dim)])

    def regularizer(self, t: float, y: np.ndarray, anchor_sq: float = 0.0):
        return TimeVaryingMap(self.base, "accumulation", sigma=self.sigma, anchor_weight=self.alpha.A(t),
                              anchor_sum=self.blocks(y)[2], anchor_sq=anchor_sq)

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        head = super().derivative(t, y)
        return np.concatenate([head, self.alpha.derivative(t) * self.point(t, y)])


class FrankWolfeDynamics(Dynamics):
    """x' = alpha' (v - x) / alpha with v = argmin_u <grad f(x), u> + psi(u)."""

    tag = "ct-fw"

    def validate(self) -> None:
        super().validate()
        if not getattr(self.objective.feasible_set, "bounded", False):
            raise NoLMO("Frank-Wolfe dynamics need a bounded feasible set")

    def default_start(self) -> np.ndarray:
        return self.objective.composite.lmo(self.objective.feasible_set, np.zeros(self.dim))

    def correction(self, x_star: np.ndarray) -> float:
        return 0.0

    def initial_state(self, x0: Optional[np.ndarray]) -> np.ndarray:
        return np.array(self.start(x0), dtype=float)

    def point(self, t: float, y: np.ndarray) -> np.ndarray:
        return y

    def dual(self, y: np.ndarray) -> np.ndarray:
        return -finite_gradient(self.objective, y)

    def vertex(self, grad: np.ndarray) -> np.ndarray:
        return self.objective.composite.lmo(self.objective.feasible_set, grad)

    def derivative(self, t: float, y: np.ndarray) -> np.ndarray:
        vertex = self.vertex(finite_gradient(self.objective, y))
        return self.alpha.derivative(t) * (vertex - y) / self.alpha.value(t)

    def scaled_upper(self, t, y, integrals, start_value, start_psi) -> float:
        return (self.alpha.value(t) * float(self.objective.value(y))
                + self.alpha.alpha0 * start_psi + integrals["vertex_psi"])

    def scaled_lower(self, t, y, integrals, correction, f_star) -> float:
        return integrals["fw_lower"] + self.alpha.alpha0 * f_star


DYNAMICS = {
    "ct-md": MirrorDynamics,
    "ct-cmd": CompositeDynamics,
    "ct-gd": GradientFlowDynamics,
    "ct-amd": AcceleratedDynamics,
    "ct-asc": StronglyConvexDynamics,
    "ct-fw": FrankWolfeDynamics,
}


def get_dynamics(tag: str):
    """Return the dynamics class for a continuous-time tag."""
    dynamics = DYNAMICS.get(tag.lower())
    if dynamics is None:
        raise UnknownSetting(f"Unknown dynamics '{tag}', expected one of {sorted(DYNAMICS)}")
    return dynamics
