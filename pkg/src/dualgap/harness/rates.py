"""Empirical convergence rates from a gap trace."""
from dataclasses import dataclass
from typing import Iterable, Mapping, Tuple, Union

import numpy as np
import pandas as pd

from dualgap.errors import DegenerateTrace
from dualgap.harness.traces import index_column

MIN_ROWS = 40
MIN_WINDOW = 20
CONVERGED = "converged-exactly"


@dataclass(frozen=True)
class RateFit:
    """Least-squares fit of log G against log k over the window [k_max/2, k_max].

    ``exponent`` is the log-log slope (sublinear rates), ``ratio`` the
    geometric mean of G^(k)/G^(k-1) per unit step (linear rates).
    """

    exponent: float
    ratio: float
    residual: float
    window: Tuple[float, float]
    points: int

    def as_dict(self):
        return {
            "exponent": self.exponent,
            "ratio": self.ratio,
            "residual": self.residual,
            "window": list(self.window),
            "points": self.points,
        }


def fit_rate(trace: Union[pd.DataFrame, Iterable[Mapping[str, float]]], column: str = "G") -> RateFit:
    """Fit the rate of ``column`` over the second half of the trace.

    Raises:
        DegenerateTrace: fewer than 40 rows, fewer than 20 window points, or
            a gap in the window that is not positive (converged exactly)
    """
    frame = trace if isinstance(trace, pd.DataFrame) else pd.DataFrame(list(trace))
    if len(frame) < MIN_ROWS:
        raise DegenerateTrace(f"Rate fit needs at least {MIN_ROWS} rows, trace has {len(frame)}")
    index = frame[index_column(frame)].to_numpy(dtype=float)
    gaps = frame[column].to_numpy(dtype=float)

    last = float(index.max())
    in_window = (index >= last / 2.0) & (index > 0)
    steps, values = index[in_window], gaps[in_window]
    if steps.size < MIN_WINDOW:
        raise DegenerateTrace(f"Rate window [{last / 2.0:g}, {last:g}] holds {steps.size} < {MIN_WINDOW} points")
    if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
        raise DegenerateTrace(CONVERGED)

    log_steps, log_values = np.log(steps), np.log(values)
    slope, intercept = np.polyfit(log_steps, log_values, 1)
    residual = float(np.sqrt(np.mean((slope * log_steps + intercept - log_values) ** 2)))
    ratio = float(np.exp((log_values[-1] - log_values[0]) / (steps[-1] - steps[0])))
    return RateFit(float(slope), ratio, residual, (float(steps[0]), float(steps[-1])), int(steps.size))
