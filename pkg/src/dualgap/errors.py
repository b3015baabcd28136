"""Exceptions raised across dualgap."""
from typing import Optional


class DualGapError(Exception):
    """Base class for every error dualgap raises on purpose."""


class ConfigError(DualGapError, ValueError):
    """Experiment configuration is malformed or incomplete."""


class NonFinite(DualGapError, ValueError):
    """A dual vector or oracle value contains NaN or Inf."""


class Unsupported(DualGapError):
    """The requested map/set/mode combination has no usable oracle."""


class DomainError(DualGapError, ValueError):
    """A point lies outside the domain where a quantity is defined."""


class UnknownFamily(DualGapError, KeyError):
    """Instance descriptor names a family that is not built in."""


class UnknownSetting(DualGapError, KeyError):
    """Algorithm tag is not one of the tracked settings."""


class EmptyProbeSet(DualGapError, ValueError):
    """A restricted VI gap was requested over no probes."""


class MissingHistory(DualGapError):
    """The history does not carry a quantity a formula needs."""


class MissingConstant(DualGapError, KeyError):
    """A theorem bound needs a constant that was not supplied."""


class NotSmooth(DualGapError):
    """The method needs a certified smoothness constant."""


class NotStronglyConvex(DualGapError):
    """The method needs a certified strong convexity constant."""


class NoLMO(DualGapError):
    """No linear minimization oracle exists for the set."""


class UnboundedSet(DualGapError):
    """The operation needs a bounded feasible set."""


class IncompatibleConfiguration(DualGapError):
    """Solver, problem and map cannot be combined."""


class StepRejected(DualGapError):
    """The integrator could not keep the state feasible."""


class OffGrid(DualGapError, ValueError):
    """A continuous-time query was made off the recorded grid."""


class DegenerateTrace(DualGapError, ValueError):
    """A trace cannot be rate-fitted (too short, or gaps hit zero)."""


class InvariantViolation(DualGapError):
    """A tracked inequality failed during a run."""

    def __init__(self, k: int, which: str, detail: Optional[str] = None):
        self.k = k
        self.which = which
        self.detail = detail
        message = f"invariant '{which}' violated at k={k}"
        if detail:
            message = f"{message}: {detail}"
        super().__init__(message)
