"""Classical Runge-Kutta integration of the dynamics with gap monitoring."""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional

import numpy as np

from dualgap.continuous.alpha import AlphaSpec
from dualgap.continuous.dynamics import SCALAR_INTEGRALS, VECTOR_INTEGRALS, Dynamics, get_dynamics
from dualgap.errors import ConfigError, IncompatibleConfiguration, OffGrid, StepRejected
from dualgap.problems import GroundTruth, Objective, reference_solve
from dualgap.solvers.runner import default_map

logger = logging.getLogger(__name__)

MAX_HALVINGS = 20
MAX_RECORDS = 2000
GRID_ATOL = 1e-12


@dataclass(frozen=True)
class ContinuousRecord:
    t: float
    A: float
    f_xhat: float
    U: float
    L: float
    G: float
    scaled_gap: float
    lemma_bound: float

    def row(self) -> Dict[str, float]:
        """CSV row; continuous runs have no discretization error."""
        return {
            "t": self.t,
            "A": self.A,
            "f_xhat": self.f_xhat,
            "U": self.U,
            "L": self.L,
            "G": self.G,
            "Ed": math.nan,
            "scaled_gap": self.scaled_gap,
            "theorem_bound": self.lemma_bound,
        }


@dataclass
class ContinuousRun:
    """Trace of one integration, sampled every max(h, T/2000)."""

    dynamics: str
    alpha: AlphaSpec
    h: float
    T: float
    truth: GroundTruth
    x0: np.ndarray
    records: List[ContinuousRecord] = field(default_factory=list)
    points: List[np.ndarray] = field(default_factory=list)
    outputs: List[np.ndarray] = field(default_factory=list)
    duals: List[np.ndarray] = field(default_factory=list)
    vertex_integrals: List[np.ndarray] = field(default_factory=list)
    halvings: int = 0

    @property
    def times(self) -> np.ndarray:
        return np.array([record.t for record in self.records])

    @property
    def final(self) -> ContinuousRecord:
        return self.records[-1]

    def index(self, t: float) -> int:
        """Position of t on the recorded grid."""
        times = self.times
        hits = np.flatnonzero(np.abs(times - t) <= GRID_ATOL * max(1.0, self.T))
        if hits.size == 0:
            raise OffGrid(f"t={t} is not on the recorded grid of '{self.dynamics}'")
        return int(hits[0])

    def f_gap(self) -> List[float]:
        return [record.f_xhat - self.truth.f_star for record in self.records]

    @property
    def violation_constant(self) -> float:
        """C with max increase of alpha*G at most C*h."""
        return scaled_gap_violation(self) / self.h


def _rk4(dynamics: Dynamics, t: float, y: np.ndarray, h: float) -> np.ndarray:
    k1 = dynamics.derivative(t, y)
    k2 = dynamics.derivative(t + h / 2.0, y + h / 2.0 * k1)
    k3 = dynamics.derivative(t + h / 2.0, y + h / 2.0 * k2)
    k4 = dynamics.derivative(t + h, y + h * k3)
    return y + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _zero_integrals(dim: int) -> Dict[str, object]:
    integrals: Dict[str, object] = {name: 0.0 for name in SCALAR_INTEGRALS}
    integrals.update({name: np.zeros(dim) for name in VECTOR_INTEGRALS})
    return integrals


def _advance(dynamics: Dynamics, t: float, y: np.ndarray, sample: Dict[str, object], h: float):
    """One step of length h, split into 2^m pieces until the state stays feasible.

    Returns (y, sample, trapezoid increments, m).
    """
    alpha = dynamics.alpha
    for halvings in range(MAX_HALVINGS + 1):
        pieces = 2 ** halvings
        piece = h / pieces
        y_trial, sample_trial = y, sample
        increments = _zero_integrals(dynamics.dim)
        accepted = True
        for p in range(pieces):
            t0 = t + p * piece
            t1 = t + h if p == pieces - 1 else t0 + piece
            y_next = _rk4(dynamics, t0, y_trial, t1 - t0)
            if not dynamics.feasible(t1, y_next):
                accepted = False
                break
            sample_next = dynamics.sample(t1, y_next)
            weight = 0.5 * (alpha.value(t1) - alpha.value(t0))
            for name in increments:
                increments[name] = increments[name] + weight * (sample_trial[name] + sample_next[name])
            y_trial, sample_trial = y_next, sample_next
        if accepted:
            if halvings:
                logger.debug("Step at t=%.6g accepted after %d halvings", t, halvings)
            return y_trial, sample_trial, increments, halvings
    raise StepRejected(f"'{dynamics.tag}' left the feasible set at t={t:.6g} after {MAX_HALVINGS} halvings")


def integrate(dynamics: str, problem: Objective, map_=None, alpha: Optional[AlphaSpec] = None,
              h: float = 1e-3, T: float = 1.0, x0=None, truth: Optional[GroundTruth] = None) -> ContinuousRun:
    """Integrate ``dynamics`` on [0, T] with step h.

    Args:
        dynamics: ct-md, ct-amd, ct-gd, ct-asc, ct-cmd or ct-fw
        map_: mirror map; a euclidean map centered at x0 when omitted
        alpha: rate function, alpha(t) = 1 + t when omitted
        truth: ground truth for the gap; solved for when omitted

    Raises:
        IncompatibleConfiguration: h > T/100 or the dynamics do not fit the problem
        StepRejected: the state left the feasible set even after halving h
    """
    if h <= 0 or T <= 0:
        raise ConfigError(f"Step and horizon must be positive, got h={h}, T={T}")
    if h > T / 100.0 * (1.0 + 1e-12):
        raise IncompatibleConfiguration(f"Step h={h} exceeds T/100={T / 100.0}")
    alpha = alpha or AlphaSpec()
    x0 = None if x0 is None else np.asarray(x0, dtype=float)
    if map_ is None:
        map_ = default_map(dynamics.lower().removeprefix("ct-"), problem, x0)
    handler = get_dynamics(dynamics)(problem, map_, alpha)
    if truth is None:
        truth = reference_solve(problem)

    y = handler.initial_state(x0)
    start = handler.point(0.0, y).copy()
    start_value = float(problem.value(start))
    start_psi = problem.composite.value(start)
    correction = handler.correction(truth.x_star)
    steps = max(1, int(math.ceil(T / h - 1e-9)))
    step = T / steps
    record_every = max(1, int(round(max(step, T / MAX_RECORDS) / step)))
    run = ContinuousRun(handler.tag, alpha, step, T, truth, start)
    integrals = _zero_integrals(problem.dim)

    def record(t: float, y: np.ndarray) -> None:
        a = alpha.value(t)
        upper = handler.scaled_upper(t, y, integrals, start_value, start_psi)
        lower = handler.scaled_lower(t, y, integrals, correction, truth.f_star)
        scaled = upper - lower
        if not run.records:
            bound = scaled / a
        else:
            bound = run.records[0].scaled_gap / a
        x_hat = handler.output(t, y)
        run.records.append(ContinuousRecord(
            t=t, A=alpha.A(t), f_xhat=problem.full_value(x_hat), U=upper / a, L=lower / a,
            G=scaled / a, scaled_gap=scaled, lemma_bound=bound,
        ))
        run.points.append(handler.point(t, y).copy())
        run.outputs.append(np.array(x_hat, dtype=float))
        run.duals.append(np.array(handler.dual(y), dtype=float))
        run.vertex_integrals.append(np.array(integrals["vertex"], dtype=float))

    logger.debug("Integrating %s on %s: h=%g, T=%g, %d steps", handler.tag, problem.name, step, T, steps)
    sample = handler.sample(0.0, y)
    record(0.0, y)
    for j in range(steps):
        t = j * step
        y, sample, increments, halvings = _advance(handler, t, y, sample, step)
        run.halvings += halvings
        for name, value in increments.items():
            integrals[name] = integrals[name] + value
        if (j + 1) % record_every == 0 or j == steps - 1:
            record(T if j == steps - 1 else (j + 1) * step, y)
    logger.debug("Finished %s: G(T)=%.6g", handler.tag, run.final.G)
    return run


def continuous_gap(run: ContinuousRun, t: float) -> float:
    """G(t) at a recorded grid point.

    Raises:
        OffGrid: t was not recorded
    """
    return run.records[run.index(t)].G


def lemma_bound(run: ContinuousRun, t: float) -> float:
    """alpha(0) G(0) / alpha(t)."""
    return run.records[0].scaled_gap / run.alpha.value(t)


def scaled_gap_violation(run: ContinuousRun) -> float:
    """Largest increase of alpha*G between consecutive records (0 if none)."""
    scaled = np.array([record.scaled_gap for record in run.records])
    if scaled.size < 2:
        return 0.0
    return max(0.0, float(np.max(np.diff(scaled))))


def averaging_residual(run: ContinuousRun) -> float:
    """max_t ||x(t) - (alpha(0) x(0) + integral of v d alpha) / alpha(t)|| for ct-fw."""
    worst = 0.0
    for record, point, vertex_sum in zip(run.records, run.points, run.vertex_integrals):
        average = (run.alpha.alpha0 * run.x0 + vertex_sum) / run.alpha.value(record.t)
        worst = max(worst, float(np.linalg.norm(point - average)))
    return worst
