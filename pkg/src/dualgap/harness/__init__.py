from dualgap.harness.experiment import (
    EXIT_CONFIG,
    EXIT_FAILURE,
    EXIT_INVARIANT,
    EXIT_OK,
    ExperimentResult,
    exit_code_for,
    run_experiment,
    write_summary,
)
from dualgap.harness.rates import CONVERGED, RateFit, fit_rate
from dualgap.harness.traces import columns_for, read_trace, trace_frame, write_trace
from dualgap.harness.verify import CHECKS, TAGS, CheckResult, VerifyReport, selected_tags, verify_suite

__all__ = [
    "CHECKS",
    "CONVERGED",
    "EXIT_CONFIG",
    "EXIT_FAILURE",
    "EXIT_INVARIANT",
    "EXIT_OK",
    "TAGS",
    "CheckResult",
    "ExperimentResult",
    "RateFit",
    "VerifyReport",
    "columns_for",
    "exit_code_for",
    "fit_rate",
    "read_trace",
    "run_experiment",
    "selected_tags",
    "trace_frame",
    "verify_suite",
    "write_summary",
    "write_trace",
]
