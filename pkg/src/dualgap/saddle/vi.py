"""Monotone variational inequalities and convex-concave saddle problems.

Both reduce to the mirror descent / mirror prox machinery: the operator
plays the role of the gradient of a zero objective, and the tracked gap
(with max phi as the regularizer correction) certifies the VI gap.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np

from dualgap.errors import ConfigError, InvariantViolation, MissingConstant, NotSmooth, UnboundedSet
from dualgap.gap_tracker import GapRecord, GapTracker, History, Schedule, theorem_bound
from dualgap.gap_tracker import schedule as schedules
from dualgap.mirror_maps import as_time_varying, grad_conjugate, make_map
from dualgap.problems import (
    Constants,
    GroundTruth,
    MonotoneOp,
    Objective,
    SaddleProblem,
    make_probes,
    restricted_vi_gap,
)
from dualgap.solvers import run

logger = logging.getLogger(__name__)

VI_METHODS = ("md", "mp")
SANDWICH_TOL = 1e-9


@dataclass
class SaddleRun:
    """Output of a VI or saddle solve.

    ``probe_gaps[k]`` is the probe-restricted VI gap of x_hat^(k); the
    tracked G in ``records`` is the probe-free certificate.
    """

    method: str
    history: History
    records: List[GapRecord]
    probes: np.ndarray
    probe_gaps: List[float]
    vbar_gaps: List[float] = field(default_factory=list)
    v_bar: Optional[np.ndarray] = None
    w_bar: Optional[np.ndarray] = None

    @property
    def x_hat(self) -> np.ndarray:
        return self.history.last.x_hat

    @property
    def certificate(self) -> float:
        return self.records[-1].G

    @property
    def probe_gap(self) -> float:
        return self.probe_gaps[-1]

    @property
    def primal_dual_gap(self) -> Optional[float]:
        return self.vbar_gaps[-1] if self.vbar_gaps else None

    def rows(self) -> List[Dict[str, Any]]:
        """Gap records with the probe columns appended."""
        rows = []
        for i, record in enumerate(self.records):
            row = record.row()
            row["vbar_gap"] = self.vbar_gaps[i] if self.vbar_gaps else math.nan
            row["probe_gap"] = self.probe_gaps[i]
            rows.append(row)
        return rows


def operator_objective(op: MonotoneOp, map_) -> Objective:
    """Zero objective whose 'gradient' is the operator."""
    return Objective(
        dim=op.dim,
        value=lambda x: 0.0,
        gradient=op.operator,
        feasible_set=op.feasible_set,
        constants=Constants(lipschitz=op.bound, smooth=op.smooth_for(map_.norm)),
        name=op.name,
    )


def _default_schedule(method: str, op: MonotoneOp, map_, k: int) -> Schedule:
    if method == "md":
        return schedules.md_decaying(k)
    smooth = op.smooth_for(map_.norm)
    if not smooth:
        raise NotSmooth(f"Mirror prox on {op.name} needs a smoothness constant")
    return schedules.mp(k, map_.strong_convexity / smooth)


def _theorem(method: str, op: MonotoneOp, map_, schedule: Schedule, max_phi: float):
    if method == "mp":
        if schedule.kind != "mp":
            return None
        params = {"max_phi": max_phi, "step": schedule.params.get("step")}
    else:
        params = {"max_phi": max_phi, "strong_convexity": map_.strong_convexity,
                  "operator_bound": op.bound, "weights": schedule.weights}
    setting = "mp" if method == "mp" else "md-vi"
    try:
        theorem_bound(setting, 1, params)
    except MissingConstant as e:
        logger.debug("No VI theorem bound: %s", e)
        return None
    return lambda k: theorem_bound(setting, k, params)


class _ProbeGap:
    """Vectorized max over probes u of <F(u), x - u>."""

    def __init__(self, op: MonotoneOp, probes: np.ndarray):
        self.values = np.array([op.operator(u) for u in probes])
        self.offsets = np.einsum("ij,ij->i", self.values, probes)

    def __call__(self, x: np.ndarray) -> float:
        return float(np.max(self.values @ x - self.offsets))


def solve_vi(op: MonotoneOp, map_=None, schedule: Optional[Schedule] = None, k: int = 100,
             method: str = "mp", probes: Optional[np.ndarray] = None, truth: Optional[GroundTruth] = None,
             seed: int = 0, x0=None, strict: bool = True) -> SaddleRun:
    """Solve a monotone VI with mirror descent or mirror prox.

    Raises:
        UnboundedSet: the feasible set is unbounded
        NotSmooth: mirror prox without a smoothness constant
    """
    if method not in VI_METHODS:
        raise ConfigError(f"Unknown VI method '{method}', expected one of {VI_METHODS}")
    region = op.feasible_set
    if not region.bounded:
        raise UnboundedSet(f"VI solving needs a bounded feasible set, {op.name} has none")
    if map_ is None:
        map_ = make_map(region, "euclidean")
    base = as_time_varying(map_).base
    if schedule is None:
        schedule = _default_schedule(method, op, base, k)
    if method == "mp" and not op.smooth_for(base.norm):
        raise NotSmooth(f"Mirror prox on {op.name} needs a smoothness constant")
    extra = None if truth is None else truth.x_star
    if probes is None:
        probes = make_probes(region, np.random.default_rng(seed), extra=extra)
    elif extra is not None:
        probes = np.vstack([np.asarray(probes, dtype=float), np.atleast_2d(extra)])

    max_phi = base.max_value()
    centered = x0 is None or np.allclose(x0, grad_conjugate(base, np.zeros(op.dim)), rtol=0.0, atol=1e-12)
    tracker = GapTracker(
        method,
        correction=max_phi,
        f_star=0.0,
        theorem=_theorem(method, op, base, schedule, max_phi) if centered else None,
        certificate=True,
        strict=strict,
    )
    objective = operator_objective(op, base)
    result = run(method, objective, map_, schedule, k, truth=None, x0=x0, tracker=tracker)
    probe_gap = _ProbeGap(op, probes)
    gaps = [probe_gap(step.x_hat) for step in result.history]
    gaps[-1] = restricted_vi_gap(op, result.history.last.x_hat, probes)
    logger.debug("VI %s on %s: certificate %.6g, probe gap %.6g", method, op.name, result.final.G, gaps[-1])
    return SaddleRun(method, result.history, result.records, probes, gaps)


def _vbar_gap(problem: SaddleProblem, v_bar: np.ndarray, w_bar: np.ndarray,
              v_probes: np.ndarray, w_probes: np.ndarray) -> float:
    """max over probes of Phi(v_bar, w) - Phi(v, w_bar)."""
    best_w = max(problem.value(v_bar, w) for w in w_probes)
    best_v = min(problem.value(v, w_bar) for v in v_probes)
    return float(best_w - best_v)


def solve_saddle(problem: SaddleProblem, map_=None, schedule: Optional[Schedule] = None, k: int = 100,
                 method: str = "mp", probes: Optional[np.ndarray] = None, truth: Optional[GroundTruth] = None,
                 seed: int = 0, x0=None, strict: bool = True) -> SaddleRun:
    """Solve min_v max_w Phi through the induced operator [grad_v Phi, -grad_w Phi].

    With a known saddle point and a bilinear Phi, Phi(v_bar, w*) - Phi(v*, w_bar)
    equals <F(x*), x_bar - x*> and is checked against the restricted VI gap,
    whose point set includes the saddle. For a general convex-concave Phi
    the two quantities are not ordered, so the check is skipped.
    """
    saddle_run = solve_vi(problem.operator(), map_, schedule, k, method, probes, truth, seed, x0, strict)
    v_probes, w_probes = zip(*(problem.split(u) for u in saddle_run.probes))
    for step in saddle_run.history:
        v_bar, w_bar = problem.split(step.x_hat)
        saddle_run.vbar_gaps.append(_vbar_gap(problem, v_bar, w_bar, v_probes, w_probes))
    saddle_run.v_bar, saddle_run.w_bar = problem.split(saddle_run.x_hat)

    if truth is not None and not problem.bilinear:
        logger.debug("Saddle sandwich check skipped: %s is not bilinear", problem.name)
    elif truth is not None:
        v_star, w_star = problem.split(truth.x_star)
        at_saddle = problem.primal_dual_gap(saddle_run.v_bar, saddle_run.w_bar, v_star, w_star)
        if at_saddle > saddle_run.probe_gap + SANDWICH_TOL:
            raise InvariantViolation(saddle_run.history.k, "saddle-sandwich",
                                     f"Phi gap at the saddle {at_saddle:.6g} > probe gap {saddle_run.probe_gap:.6g}")
    return saddle_run
