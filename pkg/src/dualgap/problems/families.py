"""Built-in instance families.

Every builder takes the instance descriptor (a plain dict, as it appears in
an experiment config) and a seeded generator, and returns the problem plus
its ground truth. ``make_instance`` is the single entry point.
"""
import logging
from typing import Any, Callable, Dict, Optional, Tuple, Union

import numpy as np

from dualgap.errors import ConfigError, UnknownFamily
from dualgap.mirror_maps import CompositePart, FeasibleSet
from dualgap.problems.oracles import Constants, GroundTruth, MonotoneOp, Objective, SaddleProblem
from dualgap.problems.reference import certify, certify_monotone, reference_solve, solve_matrix_game

logger = logging.getLogger(__name__)

Problem = Union[Objective, MonotoneOp, SaddleProblem]
Instance = Tuple[Problem, GroundTruth]


def make_set(spec: Optional[Dict[str, Any]], dim: int) -> FeasibleSet:
    """Build a feasible set from its descriptor; R^n when ``spec`` is empty."""
    spec = dict(spec or {"kind": "rn"})
    kind = spec.get("kind", "rn")
    if kind == "rn":
        return FeasibleSet.rn(dim)
    if kind == "simplex":
        return FeasibleSet.simplex(dim)
    if kind == "box":
        if "half_width" in spec:
            return FeasibleSet.cube(dim, float(spec["half_width"]))
        lower = np.broadcast_to(np.asarray(spec.get("lower", -1.0), dtype=float), (dim,))
        upper = np.broadcast_to(np.asarray(spec.get("upper", 1.0), dtype=float), (dim,))
        return FeasibleSet.box(lower, upper)
    if kind == "ball":
        center = np.broadcast_to(np.asarray(spec.get("center", 0.0), dtype=float), (dim,))
        return FeasibleSet.ball(center, float(spec.get("radius", 1.0)))
    raise ConfigError(f"Unknown set kind '{kind}'")


def _max_norm(region: FeasibleSet) -> Optional[float]:
    """max ||x||_2 over a bounded set."""
    if region.kind == "rn":
        return None
    if region.kind == "simplex":
        return 1.0
    if region.kind == "box":
        return float(np.linalg.norm(np.maximum(np.abs(region.lower), np.abs(region.upper))))
    return float(np.linalg.norm(region.center) + region.radius)


def _rotation(rng: np.random.Generator, dim: int) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((dim, dim)))
    return q * np.sign(np.diag(r))


def _quadratic(descriptor: Dict[str, Any], rng: np.random.Generator, default_set=None) -> Instance:
    """f(x) = 1/2 x^T Q x - b^T x."""
    if "diag" in descriptor:
        spectrum = np.asarray(descriptor["diag"], dtype=float)
        dim = spectrum.size
        hessian = np.diag(spectrum)
    else:
        dim = int(descriptor.get("dim", 2))
        low = float(descriptor.get("strongly_convex", 1.0))
        high = float(descriptor.get("smooth", 4.0))
        spectrum = np.linspace(low, high, dim)
        rotation = _rotation(rng, dim) if descriptor.get("rotate", True) else np.eye(dim)
        hessian = rotation @ np.diag(spectrum) @ rotation.T
        hessian = 0.5 * (hessian + hessian.T)
    if np.any(spectrum <= 0):
        raise ConfigError("Quadratic family needs a positive definite Hessian")

    if "b" in descriptor:
        linear = np.asarray(descriptor["b"], dtype=float)
    elif "minimizer" in descriptor:
        linear = hessian @ np.asarray(descriptor["minimizer"], dtype=float)
    elif descriptor.get("random_b", "diag" not in descriptor):
        linear = float(descriptor.get("b_scale", 1.0)) * rng.standard_normal(dim)
    else:
        linear = np.zeros(dim)
    if linear.shape != (dim,):
        raise ConfigError(f"Quadratic linear term must have dimension {dim}")

    region = make_set(descriptor.get("set", default_set), dim)
    inverse = np.linalg.inv(hessian)
    smooth, strong = float(spectrum.max()), float(spectrum.min())
    reach = _max_norm(region)
    lipschitz = None if reach is None else smooth * reach + float(np.linalg.norm(linear))

    objective = Objective(
        dim=dim,
        value=lambda x: 0.5 * float(x @ hessian @ x) - float(linear @ x),
        gradient=lambda x: hessian @ x - linear,
        feasible_set=region,
        constants=Constants(lipschitz=lipschitz, smooth=smooth, strongly_convex=strong, hoelder=(smooth, 1.0)),
        conjugate=lambda y: 0.5 * float((y + linear) @ inverse @ (y + linear)),
        name=f"quadratic[{dim}]",
    )
    unconstrained = inverse @ linear
    if region.contains(unconstrained):
        truth = GroundTruth(unconstrained, objective.value(unconstrained), "closed-form")
    else:
        truth = reference_solve(objective)
    return objective, truth


def _simplex_quadratic(descriptor: Dict[str, Any], rng: np.random.Generator) -> Instance:
    return _quadratic(descriptor, rng, default_set={"kind": "simplex"})


def _lasso(descriptor: Dict[str, Any], rng: np.random.Generator) -> Instance:
    """f(x) = 1/2 ||Mx - y||^2 with psi = lam ||x||_1."""
    if "matrix" in descriptor:
        matrix = np.atleast_2d(np.asarray(descriptor["matrix"], dtype=float))
        target = np.asarray(descriptor["target"], dtype=float)
    else:
        dim = int(descriptor.get("dim", 5))
        rows = int(descriptor.get("rows", dim))
        rank = min(rows, dim)
        lo, hi = descriptor.get("singular_values", (1.0, 2.0))
        singular = np.linspace(float(lo), float(hi), rank)
        left = _rotation(rng, rows)[:, :rank]
        right = _rotation(rng, dim)[:, :rank]
        matrix = left @ np.diag(singular) @ right.T
        target = rng.standard_normal(rows)
    rows, dim = matrix.shape
    correlation = matrix.T @ target
    if "lam" in descriptor:
        lam = float(descriptor["lam"])
    else:
        lam = float(descriptor.get("lam_ratio", 0.1)) * float(np.max(np.abs(correlation)))

    gram = matrix.T @ matrix
    eigenvalues = np.linalg.eigvalsh(gram)
    smooth = float(eigenvalues.max())
    strong = float(eigenvalues.min()) if rows >= dim else 0.0
    region = make_set(descriptor.get("set"), dim)
    reach = _max_norm(region)
    lipschitz = None if reach is None else smooth * reach + float(np.linalg.norm(correlation))

    objective = Objective(
        dim=dim,
        value=lambda x: 0.5 * float(np.sum((matrix @ x - target) ** 2)),
        gradient=lambda x: gram @ x - correlation,
        feasible_set=region,
        constants=Constants(lipschitz=lipschitz, smooth=smooth,
                            strongly_convex=strong if strong > 0 else None, hoelder=(smooth, 1.0)),
        composite=CompositePart(kind="l1", weight=lam),
        name=f"lasso[{rows}x{dim}]",
    )
    return objective, reference_solve(objective)


def _huber(descriptor: Dict[str, Any], rng: np.random.Generator) -> Instance:
    """Weighted huberized |x - c|; delta = 0 is the plain absolute value."""
    if "weights" in descriptor:
        weights = np.asarray(descriptor["weights"], dtype=float)
        dim = weights.size
    else:
        dim = int(descriptor.get("dim", 2))
        weights = rng.uniform(0.5, 1.5, dim)
    if "center" in descriptor:
        center = np.broadcast_to(np.asarray(descriptor["center"], dtype=float), (dim,)).copy()
    else:
        center = rng.uniform(-0.5, 0.5, dim)
    delta = float(descriptor.get("delta", 0.0))
    region = make_set(descriptor.get("set", {"kind": "box", "half_width": 1.0}), dim)
    if region.kind not in ("rn", "box"):
        raise ConfigError("Huber family is defined on R^n or a box")

    def value(x):
        t = np.abs(x - center)
        if delta == 0.0:
            return float(weights @ t)
        return float(weights @ np.where(t <= delta, t ** 2 / (2 * delta), t - delta / 2))

    def gradient(x):
        t = x - center
        if delta == 0.0:
            return weights * np.sign(t)
        return weights * np.clip(t / delta, -1.0, 1.0)

    smooth = float(weights.max()) / delta if delta > 0 else None
    objective = Objective(
        dim=dim,
        value=value,
        gradient=gradient,
        feasible_set=region,
        constants=Constants(lipschitz=float(np.linalg.norm(weights)), smooth=smooth,
                            hoelder=(smooth, 1.0) if smooth else None),
        name=f"huber[{dim}, delta={delta:g}]",
    )
    x_star = region.project(center)
    return objective, GroundTruth(x_star, objective.value(x_star), "closed-form")


def _bilinear(descriptor: Dict[str, Any], rng: np.random.Generator) -> Instance:
    """Phi(v, w) = v^T M w on a box, saddle point at the origin."""
    if "matrix" in descriptor:
        matrix = np.atleast_2d(np.asarray(descriptor["matrix"], dtype=float))
    elif descriptor.get("random", False):
        v_dim = int(descriptor.get("v_dim", 2))
        matrix = rng.standard_normal((v_dim, int(descriptor.get("w_dim", v_dim))))
    else:
        matrix = np.eye(int(descriptor.get("v_dim", 1)), int(descriptor.get("w_dim", 1)))
    half_width = float(descriptor.get("half_width", 1.0))
    v_dim, w_dim = matrix.shape
    problem = SaddleProblem(
        v_set=FeasibleSet.cube(v_dim, half_width),
        w_set=FeasibleSet.cube(w_dim, half_width),
        value=lambda v, w: float(v @ matrix @ w),
        grad_v=lambda v, w: matrix @ w,
        grad_w=lambda v, w: matrix.T @ v,
        smooth=float(np.linalg.norm(matrix, 2)),
        smooth_l1=float(np.max(np.abs(matrix))),
        name=f"bilinear[{v_dim}x{w_dim}]",
        bilinear=True,
    )
    return problem, GroundTruth(np.zeros(v_dim + w_dim), 0.0, "closed-form")


def _matrix_game(descriptor: Dict[str, Any], rng: np.random.Generator) -> Instance:
    """min over the v-simplex, max over the w-simplex of v^T M w."""
    if "matrix" in descriptor:
        matrix = np.atleast_2d(np.asarray(descriptor["matrix"], dtype=float))
    else:
        v_dim = int(descriptor.get("v_dim", 3))
        matrix = rng.uniform(-1.0, 1.0, (v_dim, int(descriptor.get("w_dim", v_dim))))
    v_dim, w_dim = matrix.shape
    problem = SaddleProblem(
        v_set=FeasibleSet.simplex(v_dim),
        w_set=FeasibleSet.simplex(w_dim),
        value=lambda v, w: float(v @ matrix @ w),
        grad_v=lambda v, w: matrix @ w,
        grad_w=lambda v, w: matrix.T @ v,
        smooth=float(np.linalg.norm(matrix, 2)),
        smooth_l1=float(np.max(np.abs(matrix))),
        name=f"matrix-game[{v_dim}x{w_dim}]",
        bilinear=True,
    )
    v_star, w_star, game_value = solve_matrix_game(matrix)
    return problem, GroundTruth(np.concatenate([v_star, w_star]), game_value, "reference-solve")


def _zero(descriptor: Dict[str, Any], rng: np.random.Generator) -> Instance:
    """Constant objective, or the zero operator when ``operator`` is set."""
    dim = int(descriptor.get("dim", 2))
    region = make_set(descriptor.get("set", {"kind": "box", "half_width": 1.0}), dim)
    level = float(descriptor.get("level", 0.0))
    anchor = region.project(np.zeros(dim))
    if descriptor.get("operator", False):
        op = MonotoneOp(dim=dim, operator=lambda x: np.zeros(dim), feasible_set=region,
                        smooth=1.0, smooth_l1=1.0, bound=0.0, name=f"zero-op[{dim}]")
        return op, GroundTruth(anchor, 0.0, "closed-form")
    objective = Objective(
        dim=dim,
        value=lambda x: level,
        gradient=lambda x: np.zeros(dim),
        feasible_set=region,
        constants=Constants(lipschitz=0.0 if region.bounded else None, smooth=1.0, hoelder=(1.0, 1.0)),
        name=f"zero[{dim}]",
    )
    return objective, GroundTruth(anchor, level, "closed-form")


FAMILIES: Dict[str, Callable[[Dict[str, Any], np.random.Generator], Instance]] = {
    "quadratic": _quadratic,
    "simplex-quadratic": _simplex_quadratic,
    "lasso": _lasso,
    "huber": _huber,
    "bilinear": _bilinear,
    "matrix-game": _matrix_game,
    "zero": _zero,
}


def make_instance(descriptor: Dict[str, Any], seed: int = 0) -> Instance:
    """Build a problem and its certified ground truth from a descriptor.

    Args:
        descriptor: dict with a ``family`` key and family-specific parameters
        seed: seeds every random choice of the family

    Returns:
        (problem, ground truth)

    Raises:
        UnknownFamily: family is not built in
    """
    family = descriptor.get("family")
    builder = FAMILIES.get(family)
    if builder is None:
        raise UnknownFamily(f"Unknown problem family '{family}', expected one of {sorted(FAMILIES)}")
    problem, truth = builder(descriptor, np.random.default_rng(seed))

    if descriptor.get("certify", True):
        checker = np.random.default_rng([seed, 1])
        if isinstance(problem, Objective):
            certify(problem, checker)
        elif isinstance(problem, SaddleProblem):
            certify_monotone(problem.operator(), checker)
        else:
            certify_monotone(problem, checker)
    logger.debug("Built %s (seed=%d, f*=%.6g via %s)", getattr(problem, "name", family), seed,
                 truth.f_star, truth.method)
    return problem, truth
