from dualgap.continuous.alpha import ALPHA_FAMILIES, AlphaSpec
from dualgap.continuous.dynamics import DYNAMICS, Dynamics, get_dynamics
from dualgap.continuous.integrator import (
    ContinuousRecord,
    ContinuousRun,
    averaging_residual,
    continuous_gap,
    integrate,
    lemma_bound,
    scaled_gap_violation,
)

__all__ = [
    "ALPHA_FAMILIES",
    "DYNAMICS",
    "AlphaSpec",
    "ContinuousRecord",
    "ContinuousRun",
    "Dynamics",
    "averaging_residual",
    "continuous_gap",
    "get_dynamics",
    "integrate",
    "lemma_bound",
    "scaled_gap_violation",
]
