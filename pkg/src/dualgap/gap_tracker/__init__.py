from dualgap.gap_tracker.bounds import (
    SETTINGS,
    ErrorTerms,
    discretization_error,
    error_terms,
    fenchel_lower_bound,
    lower_bound,
    mirror_step_error,
    theorem_bound,
    upper_bound,
)
from dualgap.gap_tracker.history import History, Step
from dualgap.gap_tracker.schedule import SCHEDULE_KINDS, Schedule, asc_ratio, build_schedule
from dualgap.gap_tracker.tracker import CSV_COLUMNS, GapRecord, GapTracker

__all__ = [
    "CSV_COLUMNS",
    "SCHEDULE_KINDS",
    "SETTINGS",
    "ErrorTerms",
    "GapRecord",
    "GapTracker",
    "History",
    "Schedule",
    "Step",
    "asc_ratio",
    "build_schedule",
    "discretization_error",
    "error_terms",
    "fenchel_lower_bound",
    "lower_bound",
    "mirror_step_error",
    "theorem_bound",
    "upper_bound",
]
