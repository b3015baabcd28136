"""Config-driven experiment runs: trace CSV plus JSON summary."""
import json
import logging
import math
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Optional, Union

import numpy as np

from dualgap.config import ExperimentConfig
from dualgap.continuous import AlphaSpec, integrate, scaled_gap_violation
from dualgap.errors import (
    ConfigError,
    DegenerateTrace,
    IncompatibleConfiguration,
    InvariantViolation,
    NoLMO,
    NotSmooth,
    NotStronglyConvex,
    UnboundedSet,
    UnknownSetting,
    Unsupported,
)
from dualgap.gap_tracker import build_schedule
from dualgap.harness.rates import CONVERGED, fit_rate
from dualgap.harness.traces import columns_for, write_trace
from dualgap.mirror_maps import make_map
from dualgap.problems import MonotoneOp, Objective, SaddleProblem, make_instance
from dualgap.saddle import solve_saddle, solve_vi
from dualgap.solvers import run

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_INVARIANT = 2
EXIT_CONFIG = 3

# a solver, problem and map that cannot be combined
MISMATCH_ERRORS = (Unsupported, NotSmooth, NotStronglyConvex, NoLMO, UnboundedSet, UnknownSetting)


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: List[Dict[str, float]]
    summary: Dict[str, Any]
    trace_path: Optional[Path] = None
    summary_path: Optional[Path] = None
    violation: Optional[InvariantViolation] = field(default=None, repr=False)

    @property
    def exit_code(self) -> int:
        return EXIT_INVARIANT if self.violation is not None else EXIT_OK


def exit_code_for(error: Exception) -> int:
    """0/2/3 contract of the run command; other dualgap errors exit 1."""
    if isinstance(error, InvariantViolation):
        return EXIT_INVARIANT
    if isinstance(error, (ConfigError, IncompatibleConfiguration)):
        return EXIT_CONFIG
    return EXIT_FAILURE


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or not math.isfinite(value):
        return None
    return float(value)


def _build_map(config: ExperimentConfig, region):
    if config.map is None:
        return None
    spec = config.map
    return make_map(region, spec.get("kind", "euclidean"), float(spec.get("scale", 1.0)), spec.get("center"))


def _build_schedule(config: ExperimentConfig):
    if config.schedule is None:
        return None
    params = {key: value for key, value in config.schedule.items() if key != "kind"}
    return build_schedule(config.schedule["kind"], config.k_max, **params)


def _alpha(config: ExperimentConfig) -> AlphaSpec:
    try:
        return AlphaSpec(**config.alpha)
    except TypeError as e:
        raise ConfigError(f"Bad alpha parameters: {e}")


def _solve(config: ExperimentConfig, problem, truth):
    """Dispatch on the solver mode; returns (rows, run-specific summary fields)."""
    x0 = None if config.initial_point is None else np.asarray(config.initial_point, dtype=float)
    region = problem.feasible_set
    map_ = _build_map(config, region)

    if config.mode == "continuous":
        if not isinstance(problem, Objective):
            raise IncompatibleConfiguration(f"'{config.solver}' needs an objective, got {type(problem).__name__}")
        result = integrate(config.solver, problem, map_, _alpha(config), config.h, config.T, x0, truth)
        rows = [record.row() for record in result.records]
        final = result.final
        return rows, {
            "final_gap": final.G,
            "f_gap": final.f_xhat - truth.f_star,
            "final_bound": final.lemma_bound,
            "bound_margin": final.lemma_bound - (final.f_xhat - truth.f_star),
            "max_scaled_gap_increase": scaled_gap_violation(result),
            "violation_constant": result.violation_constant,
            "halvings": result.halvings,
        }

    schedule = _build_schedule(config)
    if config.mode == "vi":
        kwargs = dict(map_=map_, schedule=schedule, k=config.k_max, method=config.method, truth=truth,
                      seed=config.seed, x0=x0, strict=config.strict)
        if isinstance(problem, SaddleProblem):
            result = solve_saddle(problem, **kwargs)
        else:
            op = problem if isinstance(problem, MonotoneOp) else MonotoneOp.from_objective(problem)
            result = solve_vi(op, **kwargs)
        final = result.records[-1]
        return result.rows(), {
            "final_gap": final.G,
            "probe_gap": result.probe_gap,
            "primal_dual_gap": result.primal_dual_gap,
            "final_bound": final.theorem_bound,
            "bound_margin": None if final.theorem_bound is None else final.theorem_bound - final.G,
        }

    if not isinstance(problem, Objective):
        raise IncompatibleConfiguration(f"'{config.solver}' needs an objective, got {type(problem).__name__}")
    result = run(config.solver, problem, map_, schedule, config.k_max, tracker_on=config.tracker, truth=truth,
                 x0=x0, strict=config.strict)
    if not config.tracker:
        rows = [{"k": step.i, "A": step.A, "f_xhat": step.hat_full} for step in result.history]
        return rows, {"f_gap": result.history.last.hat_full - truth.f_star}
    final = result.final
    f_gap = final.f_xhat - truth.f_star
    return [record.row() for record in result.records], {
        "final_gap": final.G,
        "f_gap": f_gap,
        "final_bound": final.theorem_bound,
        "bound_margin": None if final.theorem_bound is None else final.theorem_bound - f_gap,
        "max_chain_violation": result.tracker.max_chain_violation,
        "violations": len(result.tracker.violations),
    }


def _rate_summary(rows: List[Dict[str, float]]) -> Union[Dict[str, Any], str]:
    try:
        return fit_rate(rows).as_dict()
    except DegenerateTrace as e:
        return CONVERGED if str(e) == CONVERGED else f"not fitted: {e}"


def _clean(values: Dict[str, Any]) -> Dict[str, Any]:
    return {key: _finite(value) if isinstance(value, float) else value for key, value in values.items()}


def write_summary(summary: Dict[str, Any], path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8") as f:
        json.dump(summary, f, indent=2)
    return path


def run_experiment(config: ExperimentConfig, out_dir: Optional[Union[str, Path]] = None) -> ExperimentResult:
    """Run one experiment and write its trace and summary.

    Output paths are taken relative to ``out_dir`` (the working directory
    when omitted). Nothing is written when the configuration fails, the
    summary alone (status "invariant-violation") when a strict run aborts.

    Raises:
        ConfigError: malformed problem, map or schedule parameters
        IncompatibleConfiguration: solver, problem and map do not fit together
    """
    base = Path(out_dir) if out_dir is not None else Path.cwd()
    trace_path, summary_path = base / config.trace, base / config.summary
    started = time.perf_counter()
    logger.debug("Experiment %s on %s (seed=%d)", config.solver, config.problem.get("family"), config.seed)

    try:
        problem, truth = make_instance(config.problem, config.seed)
    except (TypeError, ValueError) as e:
        if isinstance(e, ConfigError):
            raise
        raise ConfigError(f"Bad problem descriptor: {e}")

    summary: Dict[str, Any] = {
        "solver": config.solver,
        "problem": getattr(problem, "name", config.problem.get("family")),
        "seed": config.seed,
        "f_star": truth.f_star,
    }
    try:
        rows, fields = _solve(config, problem, truth)
    except MISMATCH_ERRORS as e:
        raise IncompatibleConfiguration(str(e)) from e
    except InvariantViolation as e:
        summary.update(status="invariant-violation", k=e.k, which=e.which, detail=e.detail,
                       wall_time=time.perf_counter() - started, config=config.raw)
        logger.debug("Experiment aborted: %s", e)
        path = write_summary(_clean(summary), summary_path)
        return ExperimentResult(config, [], summary, None, path, e)

    summary.update(_clean(fields))
    summary["status"] = "ok"
    summary["rows"] = len(rows)
    summary["rate"] = _rate_summary(rows) if config.tracker else "not fitted: tracker disabled"
    summary["wall_time"] = time.perf_counter() - started
    summary["config"] = config.raw

    written = write_trace(rows, trace_path, columns_for(config.mode))
    path = write_summary(summary, summary_path)
    logger.debug("Wrote %s and %s", written, path)
    return ExperimentResult(config, rows, summary, written, path)
