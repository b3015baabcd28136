"""Upper bounds, lower bounds, discretization errors and theorem bounds.

All functions here are pure and read a full ``History``; the running
``GapTracker`` evaluates the same quantities with O(1) work per step and
is cross-checked against these.
"""
import math
from dataclasses import dataclass
from typing import Any, Dict, Mapping, Optional

import numpy as np

from dualgap.errors import MissingConstant, MissingHistory, Unsupported, UnknownSetting
from dualgap.gap_tracker.history import History
from dualgap.gap_tracker.schedule import asc_ratio
from dualgap.mirror_maps import as_time_varying, bregman_dual, conjugate, grad_conjugate

SETTINGS = ("md", "mp", "cmd", "amd", "gd", "asc", "asc-unconstrained", "fw")
AVERAGED_SETTINGS = ("md", "mp", "cmd")

EQUALITY = "equality"
BOUND = "bound"


def check_setting(setting: str) -> None:
    if setting not in SETTINGS:
        raise UnknownSetting(f"Unknown setting '{setting}', expected one of {SETTINGS}")


@dataclass(frozen=True)
class ErrorTerms:
    """E_d of one step in both forms, with the limit the setting checks against."""

    equality: float
    bound: float
    limit: float
    form: str

    @property
    def checked(self) -> float:
        """The quantity compared against ``limit``."""
        return self.bound if self.form == BOUND else self.equality


def upper_bound(setting: str, history: History, objective=None, k: Optional[int] = None) -> float:
    """U^(k): weighted average of f-bar values, or f at the output point."""
    check_setting(setting)
    steps = history.upto(k)
    last = steps[-1]
    if setting in AVERAGED_SETTINGS:
        if last.A == 0.0:
            return steps[0].value + steps[0].psi_value
        return sum(s.a * (s.value + s.psi_value) for s in steps) / last.A
    if setting == "fw":
        averaged_psi = steps[0].a * steps[0].psi_value
        averaged_psi += sum(cur.a * prev.extra("vertex_psi") for prev, cur in zip(steps, steps[1:]))
        return last.hat_value + averaged_psi / last.A
    return last.hat_full


def lower_bound(setting: str, history: History, map_=None, objective=None,
                f_star_term: float = 0.0, correction: float = 0.0, k: Optional[int] = None) -> float:
    """L^(k) from the aggregated linear (or strongly convex) lower models.

    ``correction`` is the constant subtracted with the regularizer, phi(x*)
    for minimization and max phi for the VI certificate; ``f_star_term``
    carries the (alpha - A) f*/alpha part, zero in discrete time.
    """
    check_setting(setting)
    steps = history.upto(k)
    last = steps[-1]
    if last.A == 0.0:
        return -math.inf
    if setting == "fw":
        total = sum(
            s.a * (s.value + float(np.dot(s.grad, s.extra("vertex") - s.x)) + s.extra("vertex_psi"))
            for s in steps
        )
        return total / last.A + f_star_term
    linear = sum(s.a * (s.value - float(np.dot(s.grad, s.x))) for s in steps)
    regularizer = map_ if map_ is not None else last.map
    return (linear - conjugate(regularizer, last.z) - correction) / last.A + f_star_term


def fenchel_lower_bound(setting: str, history: History, objective, correction: float = 0.0,
                        k: Optional[int] = None) -> float:
    """Dual form of L^(k): -(sum a_i f*(grad_i) + phi_k*(z_k) + correction)/A^(k)."""
    check_setting(setting)
    if setting == "fw":
        raise Unsupported("The Frank-Wolfe lower bound has no regularized dual form")
    if objective is None or objective.conjugate is None:
        raise Unsupported("Fenchel form needs an objective with a conjugate oracle")
    steps = history.upto(k)
    last = steps[-1]
    if last.A == 0.0:
        return -math.inf
    dual = sum(s.a * objective.conjugate(s.grad) for s in steps)
    return -(dual + conjugate(last.map, last.z) + correction) / last.A


def mirror_step_error(a: float, grad, x, x_next, dual_bregman: float) -> float:
    """-a <grad, x_next - x> - D_{phi*}(z_prev, z)."""
    return -a * float(np.dot(grad, np.asarray(x_next, dtype=float) - np.asarray(x, dtype=float))) - dual_bregman


def _gradient_square(map_, grad) -> float:
    return as_time_varying(map_).dual_norm(grad) ** 2


def error_terms(setting: str, i: int, history: History, limits: Optional[Mapping[str, Any]] = None) -> ErrorTerms:
    """E_d^(i) in equality and bound form.

    Args:
        limits: constants for size checks; ``hoelder`` (L_nu, nu) and
            ``diameter`` for Frank-Wolfe

    Raises:
        MissingHistory: i < 1 or a needed quantity was not recorded
    """
    check_setting(setting)
    if i < 1:
        raise MissingHistory("Discretization error is defined for i >= 1")
    prev, cur = history[i - 1], history[i]
    a, g = cur.a, cur.grad
    limits = limits or {}

    if setting in ("md", "mp"):
        x_next = grad_conjugate(cur.map, cur.z)
        equality = mirror_step_error(a, g, cur.x, x_next, bregman_dual(cur.map, prev.z, cur.z))
        sigma = as_time_varying(cur.map).strong_convexity
        limit = a * a * _gradient_square(cur.map, g) / (2.0 * sigma) if setting == "md" else 0.0
        return ErrorTerms(equality, equality, limit, EQUALITY)

    if setting == "cmd":
        equality = (conjugate(cur.map, cur.z) - conjugate(prev.map, prev.z)
                    + a * float(np.dot(g, cur.x)) + a * cur.psi_value)
        bound = bregman_dual(cur.map, cur.z, prev.z)
        sigma = as_time_varying(cur.map).strong_convexity
        return ErrorTerms(equality, bound, a * a * _gradient_square(cur.map, g) / (2.0 * sigma), BOUND)

    if setting == "gd":
        sigma = as_time_varying(cur.map).strong_convexity
        equality = (cur.A * (cur.hat_value - cur.value)
                    - a * float(np.dot(g, cur.x_hat - cur.x))
                    - a * a * float(np.dot(g, g)) / (2.0 * sigma))
        return ErrorTerms(equality, equality, 0.0, EQUALITY)

    grad_step_gain = cur.A * (cur.hat_value - cur.value)
    if setting == "amd":
        mirror_prev = grad_conjugate(cur.map, prev.z)
        mirror_cur = grad_conjugate(cur.map, cur.z)
        breg = bregman_dual(cur.map, prev.z, cur.z)
        equality = (mirror_step_error(a, g, cur.x, mirror_cur, breg)
                    + prev.A * (cur.value - prev.value)
                    + grad_step_gain - prev.A * (prev.hat_value - prev.value))
        bound = grad_step_gain + a * float(np.dot(g, mirror_prev - mirror_cur)) - breg
        return ErrorTerms(equality, bound, 0.0, BOUND)

    if setting in ("asc", "asc-unconstrained"):
        equality = (cur.A * cur.hat_value - prev.A * prev.hat_value - a * cur.value
                    + a * float(np.dot(g, cur.x))
                    + conjugate(cur.map, cur.z) - conjugate(prev.map, prev.z))
        if setting == "asc":
            mirror_prev = grad_conjugate(prev.map, prev.z)
            mirror_cur = grad_conjugate(prev.map, cur.z)
            bound = (grad_step_gain + a * float(np.dot(g, mirror_prev - mirror_cur))
                     - bregman_dual(prev.map, prev.z, cur.z))
        else:
            bound = grad_step_gain + bregman_dual(cur.map, cur.z, prev.z)
        return ErrorTerms(equality, bound, 0.0, BOUND)

    # fw
    v_prev, v_cur = prev.extra("vertex"), cur.extra("vertex")
    equality = (prev.A * (cur.value - prev.value)
                - a * float(np.dot(g, v_cur - cur.x))
                + a * (prev.extra("vertex_psi") - cur.extra("vertex_psi")))
    bound = a * float(np.dot(g - prev.grad, v_prev - v_cur))
    limit = math.inf
    if limits.get("hoelder") is not None and limits.get("diameter") is not None:
        l_nu, nu = limits["hoelder"]
        limit = a ** (1.0 + nu) / cur.A ** nu * l_nu * limits["diameter"] ** (1.0 + nu)
    return ErrorTerms(equality, bound, limit, BOUND)


def discretization_error(setting: str, i: int, history: History) -> float:
    """E_d^(i): equality form where one exists, the bound form for cmd and fw."""
    terms = error_terms(setting, i, history)
    return terms.bound if setting in ("cmd", "fw") else terms.equality


def _require(params: Mapping[str, Any], setting: str, *names: str):
    missing = [name for name in names if params.get(name) is None]
    if missing:
        raise MissingConstant(f"Theorem bound for '{setting}' needs {', '.join(missing)}")
    return [float(params[name]) for name in names]


def _vi_dual_averaging(params: Mapping[str, Any], k: int) -> float:
    max_phi, sigma, bound = _require(params, "md-vi", "max_phi", "strong_convexity", "operator_bound")
    if params.get("weights") is not None:
        weights = np.asarray(params["weights"], dtype=float)[:k + 1]
    else:
        weights = np.full(k + 1, _require(params, "md-vi", "step")[0])
    return (max_phi + float(np.sum(weights ** 2)) * bound ** 2 / (2.0 * sigma)) / float(np.sum(weights))


def _fw_sum(params: Mapping[str, Any], k: int) -> float:
    l_nu, nu, diameter = _require(params, "fw-sum", "hoelder_constant", "hoelder_nu", "diameter")
    a = np.arange(k + 1, dtype=float) + 1.0
    cumulative = np.cumsum(a)
    return l_nu * diameter ** (1.0 + nu) * float(np.sum(a ** (1.0 + nu) / cumulative ** nu)) / cumulative[-1]


def theorem_bound(setting: str, k: int, params: Optional[Dict[str, Any]] = None) -> float:
    """Right-hand side of the convergence theorem for ``setting`` at step k.

    Raises:
        MissingConstant: params lack a constant the theorem uses
        UnknownSetting: no theorem for ``setting``
    """
    params = params or {}
    if setting in ("md", "cmd"):
        lipschitz, sigma, breg = _require(params, setting, "lipschitz", "strong_convexity", "bregman")
        return math.sqrt(2.0 * breg / sigma) * lipschitz / math.sqrt(k + 1)
    if setting == "amd":
        smooth, sigma, breg = _require(params, setting, "smooth", "strong_convexity", "bregman")
        return 4.0 * smooth * breg / (sigma * (k + 1) * (k + 2))
    if setting == "gd":
        smooth, distance_sq = _require(params, setting, "smooth", "distance_sq")
        return smooth * distance_sq / (2.0 * (k + 1))
    if setting == "asc":
        kappa, breg = _require(params, setting, "kappa", "bregman")
        return (1.0 - asc_ratio(kappa)) ** k * breg
    if setting == "asc-unconstrained":
        kappa, breg = _require(params, setting, "kappa", "bregman")
        return (1.0 - 1.0 / math.sqrt(kappa)) ** k * breg
    if setting == "fw":
        l_nu, nu, diameter = _require(params, setting, "hoelder_constant", "hoelder_nu", "diameter")
        return 2.0 ** (1.0 + nu) * l_nu * diameter ** (1.0 + nu) / (k + 1) ** nu
    if setting == "fw-sum":
        return _fw_sum(params, k)
    if setting == "mp":
        (max_phi,) = _require(params, setting, "max_phi")
        if k == 0:
            return math.inf
        if params.get("step") is not None:
            return max_phi / (float(params["step"]) * k)
        smooth, sigma = _require(params, setting, "smooth", "strong_convexity")
        return smooth / sigma * max_phi / k
    if setting == "md-vi":
        return _vi_dual_averaging(params, k)
    raise UnknownSetting(f"No theorem bound for setting '{setting}'")
