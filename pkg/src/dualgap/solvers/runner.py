"""Drive a discrete method for k_max steps with the gap tracker attached."""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, Iterator, List, Optional

import numpy as np

from dualgap.errors import (
    IncompatibleConfiguration,
    InvariantViolation,
    MissingConstant,
    NotSmooth,
    NotStronglyConvex,
    UnboundedSet,
    Unsupported,
)
from dualgap.gap_tracker import GapRecord, GapTracker, History, Schedule, theorem_bound
from dualgap.gap_tracker import schedule as schedules
from dualgap.mirror_maps import as_time_varying, make_map
from dualgap.problems import GroundTruth, Objective
from dualgap.solvers.base import SolverHandler
from dualgap.solvers.factory import get_solver

logger = logging.getLogger(__name__)

FEASIBILITY_TOL = 1e-9
AGGREGATE_RTOL = 1e-9
# methods whose theorem assumes x^(0) = grad phi*(0)
CENTERED_THEOREMS = ("md", "cmd", "amd", "asc", "asc-unconstrained")


@dataclass
class SolverRun:
    """History and gap records of one run; unpacks as (history, records)."""

    tag: str
    history: History
    records: List[GapRecord] = field(default_factory=list)
    tracker: Optional[GapTracker] = None
    truth: Optional[GroundTruth] = None

    def __iter__(self) -> Iterator[Any]:
        yield self.history
        yield self.records

    @property
    def final(self) -> Optional[GapRecord]:
        return self.records[-1] if self.records else None

    @property
    def output(self) -> np.ndarray:
        return self.history.last.x_hat

    def f_gap(self) -> List[float]:
        """f(x_hat^(k)) - f* along the run."""
        if self.truth is None:
            raise MissingConstant("f-gap needs a ground truth")
        return [step.hat_full - self.truth.f_star for step in self.history]


def default_map(tag: str, objective: Objective, x0: Optional[np.ndarray] = None):
    """Euclidean map centered at x0, scaled to L - sigma for the strongly convex methods."""
    scale = 1.0
    if tag in ("asc", "asc-unconstrained"):
        constants = objective.constants
        if constants.smooth is None or not constants.strongly_convex:
            raise NotStronglyConvex(f"'{tag}' needs smoothness and strong convexity constants")
        gap = constants.smooth - constants.strongly_convex
        scale = gap if gap > 0 else constants.smooth
    return make_map(objective.feasible_set, "euclidean", scale=scale, center=x0)


def default_schedule(tag: str, objective: Objective, map_, k_max: int,
                     truth: Optional[GroundTruth] = None) -> Schedule:
    """The schedule each method's convergence theorem is stated for.

    Mirror descent falls back to c/sqrt(i+1) when the Lipschitz constant or
    the distance to the optimum is unknown.
    """
    constants = objective.constants
    sigma = float(map_.strong_convexity)
    if tag in ("md", "cmd"):
        if constants.lipschitz and truth is not None:
            breg = float(map_.value(truth.x_star))
            if breg > 0:
                return schedules.md_fixed_horizon(k_max, constants.lipschitz, sigma, breg)
        return schedules.md_decaying(k_max)
    if tag in ("amd", "gd", "mp"):
        if not constants.smooth:
            raise NotSmooth(f"Default '{tag}' schedule needs a smoothness constant")
        if tag == "amd":
            return schedules.amd(k_max, constants.smooth, sigma)
        if tag == "gd":
            return schedules.gd(k_max, constants.smooth, sigma)
        return schedules.mp(k_max, sigma / constants.smooth)
    if tag in ("asc", "asc-unconstrained"):
        kappa = constants.condition
        if kappa is None:
            raise NotStronglyConvex(f"Default '{tag}' schedule needs the condition number")
        builder = schedules.asc if tag == "asc" else schedules.asc_unconstrained
        return builder(k_max, kappa)
    return schedules.fw(k_max)


def theorem_params(handler: SolverHandler, schedule: Schedule, truth: Optional[GroundTruth],
                   x0: np.ndarray) -> Dict[str, Any]:
    """Constants available to theorem_bound for this run."""
    objective, base = handler.objective, handler.map.base
    constants = objective.constants
    params: Dict[str, Any] = {
        "lipschitz": constants.lipschitz,
        "smooth": constants.smooth,
        "strong_convexity": base.strong_convexity,
        "kappa": constants.condition,
        "step": schedule.params.get("step"),
    }
    if constants.hoelder is not None:
        params["hoelder_constant"], params["hoelder_nu"] = constants.hoelder
    if truth is not None:
        params["bregman"] = float(base.value(truth.x_star))
        params["distance_sq"] = float(np.sum((truth.x_star - x0) ** 2))
    if objective.feasible_set.bounded:
        params["diameter"] = objective.feasible_set.diameter()
        try:
            params["max_phi"] = base.max_value()
        except (Unsupported, UnboundedSet):
            pass
    return params


def _theorem(tag: str, handler: SolverHandler, schedule: Schedule, truth: Optional[GroundTruth],
             x0: np.ndarray, check_theorem: bool):
    """(k -> bound, k to check at) or (None, None) when no theorem applies."""
    if not check_theorem or truth is None:
        return None, None
    if not schedule.in_theorem_coverage:
        logger.warning("Schedule '%s' is outside theorem coverage; theorem bound not checked", schedule.kind)
        return None, None
    if tag in CENTERED_THEOREMS and not np.allclose(x0, handler.default_start(), rtol=0.0, atol=1e-12):
        logger.warning("x0 is not the map minimizer; theorem bound for '%s' not checked", tag)
        return None, None
    params = theorem_params(handler, schedule, truth, x0)
    try:
        theorem_bound(tag, 0, params)
    except MissingConstant as e:
        logger.debug("No theorem bound for this run: %s", e)
        return None, None
    theorem_at = schedule.horizon if schedule.kind == "md-fixed-horizon" else None
    return (lambda k: theorem_bound(tag, k, params)), theorem_at


def default_tracker(tag: str, handler: SolverHandler, schedule: Schedule, truth: Optional[GroundTruth],
                    x0: np.ndarray, strict: bool = True, check_theorem: bool = True) -> GapTracker:
    objective = handler.objective
    if truth is not None:
        correction = handler.correction(truth.x_star)
    elif tag == "fw":
        correction = 0.0
    else:
        try:
            correction = handler.regularizer.max_value()
        except (Unsupported, UnboundedSet):
            logger.warning("No ground truth and an unbounded set: L is reported without its phi(x*) term")
            correction = 0.0
    limits: Dict[str, Any] = {"hoelder": objective.constants.hoelder}
    if objective.feasible_set.bounded:
        limits["diameter"] = objective.feasible_set.diameter()
    theorem, theorem_at = _theorem(tag, handler, schedule, truth, x0, check_theorem)
    return GapTracker(
        tag,
        correction=correction,
        f_star=None if truth is None else truth.f_star,
        limits=limits,
        theorem=theorem,
        theorem_at=theorem_at,
        strict=strict,
    )


def _check_feasible(objective: Objective, k: int, *points: np.ndarray) -> None:
    region = objective.feasible_set
    for point in points:
        if not region.contains(point, FEASIBILITY_TOL * (1.0 + float(np.linalg.norm(point)))):
            raise InvariantViolation(k, "feasibility", f"{point} left the feasible set")


class _AggregateCheck:
    """Running -sum a_i grad_i, compared with z at every step."""

    def __init__(self):
        self.expected = None
        self.weight = 0.0

    def observe(self, step) -> None:
        contribution = step.a * step.grad
        self.expected = -contribution if self.expected is None else self.expected - contribution
        self.weight += step.a * float(np.linalg.norm(step.grad))
        drift = float(np.max(np.abs(step.z - self.expected))) if step.z.size else 0.0
        if drift > AGGREGATE_RTOL * max(1.0, self.weight):
            raise InvariantViolation(step.i, "dual-aggregate", f"z drifted {drift:.3g} from -sum a_i grad_i")


def run(tag: str, problem: Objective, map_=None, schedule: Optional[Schedule] = None, k_max: int = 100,
        tracker_on: bool = True, truth: Optional[GroundTruth] = None, x0=None,
        tracker: Optional[GapTracker] = None, strict: bool = True, check_theorem: bool = True) -> SolverRun:
    """Run method ``tag`` for k_max steps.

    Args:
        tag: md, mp, cmd, amd, gd, asc, asc-unconstrained or fw
        problem: objective to minimize
        map_: mirror map; a euclidean map centered at x0 when omitted
        schedule: step weights; the method's theorem schedule when omitted
        tracker_on: evaluate and check the gap at every step
        truth: ground truth; enables the lower-bound and theorem checks
        tracker: use this tracker instead of building the default one

    Raises:
        IncompatibleConfiguration: method, problem, map and schedule do not fit
        InvariantViolation: a tracked invariant failed (strict trackers only)
    """
    if k_max < 0:
        raise IncompatibleConfiguration(f"k_max must be nonnegative, got {k_max}")
    x0 = None if x0 is None else np.asarray(x0, dtype=float)
    if map_ is None:
        map_ = default_map(tag, problem, x0)
    if schedule is None:
        schedule = default_schedule(tag, problem, as_time_varying(map_).base, k_max, truth)
    handler = get_solver(tag)(problem, map_, schedule)
    if len(schedule) < k_max + 1:
        raise IncompatibleConfiguration(f"Schedule covers {len(schedule)} steps, run needs {k_max + 1}")

    history = History(tag, schedule)
    aggregate = _AggregateCheck()
    state, step = handler.initialize(x0)
    start = state.x
    if tracker_on and tracker is None:
        tracker = default_tracker(tag, handler, schedule, truth, start, strict, check_theorem)
    logger.debug("Running %s on %s for k_max=%d (schedule %s)", tag, problem.name, k_max, schedule.kind)

    for i in range(k_max + 1):
        if i > 0:
            state, step = handler.step(state, i)
        history.append(step)
        aggregate.observe(step)
        _check_feasible(problem, i, step.x, step.x_hat)
        if tracker_on:
            tracker.observe(history)

    if not tracker_on:
        return SolverRun(tag, history, truth=truth)
    result = SolverRun(tag, history, list(tracker.records), tracker, truth)
    logger.debug("Finished %s: k=%d G=%.6g", tag, k_max, result.final.G)
    return result
