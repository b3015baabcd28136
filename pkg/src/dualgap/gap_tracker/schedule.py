"""Step-weight schedules a_i and their running sums A^(k)."""
import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, Sequence, Tuple

import numpy as np

from dualgap.errors import ConfigError

logger = logging.getLogger(__name__)

SCHEDULE_KINDS = (
    "md-fixed-horizon",
    "md-decaying",
    "constant",
    "amd",
    "gd",
    "asc",
    "asc-unconstrained",
    "fw",
    "mp",
    "custom",
)

# kinds whose weights come straight from a convergence theorem
THEOREM_KINDS = ("md-fixed-horizon", "amd", "gd", "asc", "asc-unconstrained", "fw", "mp")


def _readonly(values) -> np.ndarray:
    array = np.array(values, dtype=float)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class Schedule:
    """Weights a_0..a_{k_max} with prefix sums A^(k)."""

    kind: str
    weights: np.ndarray = field(compare=False)
    params: Dict[str, Any] = field(default_factory=dict, compare=False)
    cumulative: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.kind not in SCHEDULE_KINDS:
            raise ConfigError(f"Unknown schedule kind '{self.kind}', expected one of {SCHEDULE_KINDS}")
        weights = _readonly(self.weights)
        if weights.ndim != 1 or weights.size == 0:
            raise ConfigError("Schedule needs at least one weight")
        if not np.all(np.isfinite(weights)):
            raise ConfigError("Schedule weights must be finite")
        leading_zero_ok = self.kind == "mp"
        if np.any(weights[1:] <= 0) or weights[0] < 0 or (weights[0] == 0 and not leading_zero_ok):
            raise ConfigError(f"Schedule '{self.kind}' needs positive weights")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "cumulative", _readonly(np.cumsum(weights)))

    @property
    def horizon(self) -> int:
        """Largest step index the schedule covers."""
        return self.weights.size - 1

    @property
    def in_theorem_coverage(self) -> bool:
        return self.kind in THEOREM_KINDS

    def a(self, i: int) -> float:
        return float(self.weights[i])

    def A(self, k: int) -> float:
        return float(self.cumulative[k])

    def scaled(self, factor: float) -> "Schedule":
        """Same schedule with every weight multiplied by ``factor``."""
        return Schedule("custom", self.weights * factor, {**self.params, "scaled_from": self.kind, "factor": factor})

    def __len__(self) -> int:
        return self.weights.size


def md_fixed_horizon(k_max: int, lipschitz: float, strong_convexity: float, bregman: float) -> Schedule:
    """Constant a = (1/L) sqrt(2 sigma D / (k+1)) tuned for horizon k_max."""
    a = math.sqrt(2.0 * strong_convexity * bregman / (k_max + 1)) / lipschitz
    return Schedule("md-fixed-horizon", np.full(k_max + 1, a),
                    {"lipschitz": lipschitz, "strong_convexity": strong_convexity, "bregman": bregman})


def md_decaying(k_max: int, scale: float = 1.0) -> Schedule:
    """a_i = c / sqrt(i + 1); needs no distance to the optimum."""
    return Schedule("md-decaying", scale / np.sqrt(np.arange(1, k_max + 2)), {"scale": scale})


def constant(k_max: int, step: float) -> Schedule:
    return Schedule("constant", np.full(k_max + 1, float(step)), {"step": step})


def amd(k_max: int, smooth: float, strong_convexity: float = 1.0) -> Schedule:
    """a_i = (sigma/L)(i+1)/2, so A^(k) = (sigma/L)(k+1)(k+2)/4."""
    ratio = strong_convexity / smooth
    return Schedule("amd", ratio * (np.arange(k_max + 1) + 1) / 2.0,
                    {"smooth": smooth, "strong_convexity": strong_convexity})


def gd(k_max: int, smooth: float, strong_convexity: float = 1.0) -> Schedule:
    return Schedule("gd", np.full(k_max + 1, strong_convexity / smooth),
                    {"smooth": smooth, "strong_convexity": strong_convexity})


def asc_ratio(kappa: float) -> float:
    """a_i / A^(i) for the constrained strongly convex method."""
    return (math.sqrt(4.0 * kappa + 1.0) - 1.0) / (2.0 * kappa)


# |log A^(k)| cap for geometric weights; keeps A^2 and ||z||^2 finite
LOG_A_LIMIT = 300.0


def _geometric(k_max: int, ratio: float) -> Tuple[np.ndarray, Dict[str, Any]]:
    """Weights with a_i / A^(i) = ratio, built in log space.

    A^(k) = c (1 - ratio)^-k with c = 1 when that stays below e^LOG_A_LIMIT;
    otherwise c = A^(0) is lowered (at most to e^-LOG_A_LIMIT) and, once
    log A^(k) reaches the cap, the weights stay constant. A smaller
    a_i / A^(i) keeps every step's error term nonpositive, and the gap is
    below e^-LOG_A_LIMIT times the initial one by then. Iterates and gaps of
    the strongly convex methods do not depend on c.
    """
    growth = -math.log1p(-ratio)
    span = growth * k_max
    shift = 0.0 if span <= LOG_A_LIMIT else -min(span / 2.0, LOG_A_LIMIT)
    log_cumulative = shift + growth * np.arange(k_max + 1, dtype=float)
    weights = ratio * np.exp(np.minimum(log_cumulative, LOG_A_LIMIT))
    weights[0] = math.exp(shift)
    over = np.flatnonzero(log_cumulative > LOG_A_LIMIT)
    saturation = None
    if over.size:
        saturation = int(over[0]) - 1
        weights[over] = weights[saturation]
    return weights, {"normalization": math.exp(shift), "saturation": saturation}


def asc(k_max: int, kappa: float) -> Schedule:
    """a_i / A^(i) fixed, so A^(i) grows geometrically from a_0 = 1 (or the normalization)."""
    if kappa < 1:
        raise ConfigError(f"Condition number must be at least 1, got {kappa}")
    weights, scaling = _geometric(k_max, asc_ratio(kappa))
    return Schedule("asc", weights, {"kappa": kappa, **scaling})


def asc_unconstrained(k_max: int, kappa: float) -> Schedule:
    """a_i / A^(i) = 1/sqrt(kappa), geometric like ``asc``."""
    if kappa <= 1:
        raise ConfigError(f"Unconstrained variant needs kappa > 1, got {kappa}")
    weights, scaling = _geometric(k_max, 1.0 / math.sqrt(kappa))
    return Schedule("asc-unconstrained", weights, {"kappa": kappa, **scaling})


def fw(k_max: int) -> Schedule:
    """a_i = i + 1, so A^(k) = (k+1)(k+2)/2."""
    return Schedule("fw", np.arange(k_max + 1, dtype=float) + 1.0)


def mp(k_max: int, step: float) -> Schedule:
    """a_0 = 0, then a constant step; gap sums start at i = 1."""
    weights = np.full(k_max + 1, float(step))
    weights[0] = 0.0
    return Schedule("mp", weights, {"step": step})


def custom(weights: Sequence[float]) -> Schedule:
    return Schedule("custom", weights)


SCHEDULE_BUILDERS: Dict[str, Callable[..., Schedule]] = {
    "md-fixed-horizon": md_fixed_horizon,
    "md-decaying": md_decaying,
    "constant": constant,
    "amd": amd,
    "gd": gd,
    "asc": asc,
    "asc-unconstrained": asc_unconstrained,
    "fw": fw,
    "mp": mp,
}


def build_schedule(kind: str, k_max: int, **params: Any) -> Schedule:
    """Build a schedule by kind name.

    Raises:
        ConfigError: unknown kind or missing/extra parameters
    """
    if kind == "custom":
        weights = params.get("weights")
        if weights is None:
            raise ConfigError("Custom schedule needs 'weights'")
        if len(weights) < k_max + 1:
            raise ConfigError(f"Custom schedule has {len(weights)} weights, run needs {k_max + 1}")
        return custom(weights)
    builder = SCHEDULE_BUILDERS.get(kind)
    if builder is None:
        raise ConfigError(f"Unknown schedule kind '{kind}', expected one of {SCHEDULE_KINDS}")
    try:
        return builder(k_max, **params)
    except TypeError as e:
        raise ConfigError(f"Bad parameters for schedule '{kind}': {e}")
