"""Reference solves, constant certification and VI probe sets."""
import logging
from typing import Optional

import numpy as np
from scipy.optimize import linprog

from dualgap.errors import InvariantViolation, Unsupported
from dualgap.mirror_maps import soft_threshold
from dualgap.problems.oracles import GroundTruth, Objective

logger = logging.getLogger(__name__)

REFERENCE_MAX_ITER = 10 ** 6
REFERENCE_TOL = 1e-12
REFERENCE_PATIENCE = 10 ** 4

FD_STEP = 1e-6
FD_RTOL = 1e-5
FD_POINTS = 50
CONSTANT_PAIRS = 500


def _proximal_map(objective: Objective, step: float):
    part, region = objective.composite, objective.feasible_set
    if part.kind == "l1" and part.weight > 0:
        if region.kind not in ("rn", "box"):
            raise Unsupported(f"No reference prox for l1 on '{region.kind}'")
        return lambda y: region.project(soft_threshold(y, step * part.weight))
    return region.project


def reference_solve(objective: Objective, x0: Optional[np.ndarray] = None,
                    max_iter: int = REFERENCE_MAX_ITER, tol: float = REFERENCE_TOL,
                    patience: int = REFERENCE_PATIENCE) -> GroundTruth:
    """Proximal-gradient baseline with step 1/L.

    Accepted once ``patience`` consecutive iterates move by at most
    ``tol`` (relative to max(1, ||x||)).
    """
    smooth = objective.constants.smooth
    if not smooth:
        raise Unsupported(f"Reference solve for '{objective.name}' needs a smoothness constant")
    step = 1.0 / smooth
    prox = _proximal_map(objective, step)
    x = objective.feasible_set.project(np.zeros(objective.dim) if x0 is None else np.asarray(x0, dtype=float))
    calm = 0
    for iteration in range(max_iter):
        x_next = prox(x - step * objective.gradient(x))
        moved = float(np.linalg.norm(x_next - x))
        x = x_next
        calm = calm + 1 if moved <= tol * max(1.0, float(np.linalg.norm(x))) else 0
        if calm >= patience:
            logger.debug("Reference solve for %s settled after %d iterations", objective.name, iteration + 1)
            break
    else:
        logger.warning("Reference solve for %s used the full %d iterations", objective.name, max_iter)
    return GroundTruth(x_star=x, f_star=objective.full_value(x), method="reference-solve")


def solve_matrix_game(matrix: np.ndarray):
    """Equilibrium of min_v max_w v^T M w over two simplices via linear programming."""
    m, n = matrix.shape
    # variables (v, t): minimize t subject to M^T v <= t, sum v = 1, v >= 0
    primal = linprog(
        c=np.r_[np.zeros(m), 1.0],
        A_ub=np.c_[matrix.T, -np.ones(n)],
        b_ub=np.zeros(n),
        A_eq=np.r_[np.ones(m), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * m + [(None, None)],
        method="highs",
    )
    # variables (w, s): maximize s subject to M w >= s
    dual = linprog(
        c=np.r_[np.zeros(n), -1.0],
        A_ub=np.c_[-matrix, np.ones(m)],
        b_ub=np.zeros(m),
        A_eq=np.r_[np.ones(n), 0.0][None, :],
        b_eq=[1.0],
        bounds=[(0, None)] * n + [(None, None)],
        method="highs",
    )
    if primal.status != 0 or dual.status != 0:
        raise Unsupported(f"Matrix game LP failed: {primal.message} / {dual.message}")
    return primal.x[:m], dual.x[:n], float(primal.x[-1])


def _sample_points(feasible_set, rng: np.random.Generator, n: int) -> np.ndarray:
    return feasible_set.sample(rng, n)


def certify(objective: Objective, rng: np.random.Generator) -> None:
    """Check gradients by central differences and every declared constant.

    Raises:
        InvariantViolation: on the first failed check
    """
    points = _sample_points(objective.feasible_set, rng, FD_POINTS)
    eye = np.eye(objective.dim)
    for x in points:
        grad = objective.gradient(x)
        numeric = np.array([
            (objective.value(x + FD_STEP * e) - objective.value(x - FD_STEP * e)) / (2 * FD_STEP)
            for e in eye
        ])
        if np.linalg.norm(numeric - grad) > FD_RTOL * max(1.0, float(np.linalg.norm(grad))):
            raise InvariantViolation(0, "certify:gradient", f"{objective.name} at {x}")

    constants = objective.constants
    xs = _sample_points(objective.feasible_set, rng, CONSTANT_PAIRS)
    ys = _sample_points(objective.feasible_set, rng, CONSTANT_PAIRS)
    for x, y in zip(xs, ys):
        gx, gy = objective.gradient(x), objective.gradient(y)
        dist = float(np.linalg.norm(x - y))
        dgrad = float(np.linalg.norm(gx - gy))
        slack = 1e-9 * max(1.0, dgrad)
        if constants.smooth is not None and dgrad > constants.smooth * dist + slack:
            raise InvariantViolation(0, "certify:smooth", objective.name)
        if constants.strongly_convex is not None:
            if np.dot(gx - gy, x - y) < constants.strongly_convex * dist ** 2 - slack:
                raise InvariantViolation(0, "certify:strongly_convex", objective.name)
        if constants.lipschitz is not None and float(np.linalg.norm(gx)) > constants.lipschitz + 1e-9:
            raise InvariantViolation(0, "certify:lipschitz", objective.name)
        if constants.hoelder is not None:
            l_nu, nu = constants.hoelder
            if dgrad > l_nu * dist ** nu + slack:
                raise InvariantViolation(0, "certify:hoelder", objective.name)


def certify_monotone(op, rng: np.random.Generator) -> None:
    xs = op.feasible_set.sample(rng, CONSTANT_PAIRS)
    ys = op.feasible_set.sample(rng, CONSTANT_PAIRS)
    for x, y in zip(xs, ys):
        if np.dot(op.operator(x) - op.operator(y), x - y) < -1e-10:
            raise InvariantViolation(0, "certify:monotone", op.name)


def make_probes(feasible_set, rng: np.random.Generator, n_random: int = 100,
                max_vertices: int = 64, extra=None) -> np.ndarray:
    """Vertices (or a seeded subset of them) plus random feasible points."""
    try:
        vertices = feasible_set.vertices()
    except Unsupported:
        directions = rng.standard_normal((max_vertices, feasible_set.dim))
        vertices = np.array([feasible_set.lmo(d) for d in directions])
    if len(vertices) > max_vertices:
        vertices = vertices[rng.choice(len(vertices), size=max_vertices, replace=False)]
    parts = [vertices, feasible_set.sample(rng, n_random)]
    if extra is not None:
        parts.append(np.atleast_2d(np.asarray(extra, dtype=float)))
    return np.vstack(parts)
