"""Running gap tracker: one GapRecord per step, invariants checked inline."""
import logging
import math
from dataclasses import asdict, dataclass
from typing import Any, Callable, Dict, List, Mapping, Optional

import numpy as np

from dualgap.errors import InvariantViolation
from dualgap.gap_tracker.bounds import AVERAGED_SETTINGS, EQUALITY, check_setting, error_terms
from dualgap.gap_tracker.history import History
from dualgap.mirror_maps import conjugate

logger = logging.getLogger(__name__)

CHAIN_RTOL = 1e-9
VALUE_TOL = 1e-9
THEOREM_RTOL = 1e-8

CSV_COLUMNS = ("k", "A", "f_xhat", "U", "L", "G", "Ed", "scaled_gap", "theorem_bound")


@dataclass(frozen=True)
class GapRecord:
    k: int
    A: float
    f_xhat: float
    U: float
    L: float
    G: float
    scaled_gap: float
    f_best: float
    Ed: Optional[float] = None
    ed_bound: Optional[float] = None
    ed_limit: Optional[float] = None
    ed_form: Optional[str] = None
    theorem_bound: Optional[float] = None

    def row(self) -> Dict[str, Any]:
        """CSV row; missing values become NaN (written as empty cells)."""
        values = asdict(self)
        return {name: (math.nan if values[name] is None else values[name]) for name in CSV_COLUMNS}


class GapTracker:
    """Evaluates U, L, G and E_d as a run progresses.

    Args:
        setting: algorithm tag
        correction: constant subtracted in the lower bound (phi(x*) or max phi)
        f_star: optimal value; enables the lower-bound and theorem checks
        limits: constants for the E_d size checks (see ``error_terms``)
        theorem: k -> theorem bound, recorded in every row
        theorem_at: check the theorem bound only at this k (None checks every k)
        certificate: compare G itself with the theorem bound (VI runs)
        strict: raise on the first violation instead of collecting them
    """

    def __init__(self, setting: str, correction: float = 0.0, f_star: Optional[float] = None,
                 limits: Optional[Mapping[str, Any]] = None,
                 theorem: Optional[Callable[[int], float]] = None, theorem_at: Optional[int] = None,
                 certificate: bool = False, strict: bool = True):
        check_setting(setting)
        self.setting = setting
        self.correction = float(correction)
        self.f_star = f_star
        self.limits = dict(limits or {})
        self.theorem = theorem
        self.theorem_at = theorem_at
        self.certificate = certificate
        self.strict = strict
        self.records: List[GapRecord] = []
        self.violations: List[InvariantViolation] = []
        self._upper_sum = 0.0
        self._linear_sum = 0.0
        self._fw_psi_sum = 0.0
        self._fw_lower_sum = 0.0
        self._f_best = math.inf

    def _flag(self, k: int, which: str, detail: str) -> None:
        violation = InvariantViolation(k, which, detail)
        if self.strict:
            raise violation
        logger.debug("%s", violation)
        self.violations.append(violation)

    def _accumulate(self, history: History) -> None:
        cur = history.last
        if self.setting == "fw":
            vertex = cur.extra("vertex")
            weight_psi = cur.psi_value if cur.i == 0 else history[cur.i - 1].extra("vertex_psi")
            self._fw_psi_sum += cur.a * weight_psi
            self._fw_lower_sum += cur.a * (cur.value + float(np.dot(cur.grad, vertex - cur.x))
                                           + cur.extra("vertex_psi"))
            return
        self._upper_sum += cur.a * (cur.value + cur.psi_value)
        self._linear_sum += cur.a * (cur.value - float(np.dot(cur.grad, cur.x)))

    def _scaled_bounds(self, history: History):
        """(A U, A L) at the last step."""
        cur = history.last
        if self.setting == "fw":
            return cur.A * cur.hat_value + self._fw_psi_sum, self._fw_lower_sum
        lower = self._linear_sum - conjugate(cur.map, cur.z) - self.correction
        if self.setting in AVERAGED_SETTINGS:
            return self._upper_sum, lower
        return cur.A * cur.hat_full, lower

    def observe(self, history: History) -> GapRecord:
        """Record the newest step of ``history``."""
        cur = history.last
        k = cur.i
        if k != len(self.records):
            raise ValueError(f"Tracker expected step {len(self.records)}, got {k}")
        self._accumulate(history)
        scaled_upper, scaled_lower = self._scaled_bounds(history)
        scaled = scaled_upper - scaled_lower
        f_xhat = cur.hat_full
        if cur.A == 0.0:
            upper, lower, gap = cur.value + cur.psi_value, -math.inf, math.inf
        else:
            upper, lower = scaled_upper / cur.A, scaled_lower / cur.A
            gap = upper - lower
        self._f_best = min(self._f_best, f_xhat)

        if upper < f_xhat - VALUE_TOL * max(1.0, abs(upper)):
            self._flag(k, "upper-bound", f"U={upper:.17g} < f(x_hat)={f_xhat:.17g}")
        if self.f_star is not None and lower > self.f_star + VALUE_TOL * max(1.0, abs(self.f_star)):
            self._flag(k, "lower-bound", f"L={lower:.17g} > f*={self.f_star:.17g}")

        terms = None
        if k >= 1:
            previous = self.records[-1]
            terms = error_terms(self.setting, k, history, self.limits)
            scale = max(1.0, abs(scaled_upper), abs(scaled_lower), abs(previous.scaled_gap))
            tol = CHAIN_RTOL * scale
            increase = scaled - previous.scaled_gap
            if increase > terms.equality + tol:
                self._flag(k, "gap-chain", f"A*G rose by {increase:.6g} > E_d={terms.equality:.6g}")
            if terms.checked > terms.limit + tol:
                self._flag(k, "discretization-error",
                           f"{terms.form}-form E_d={terms.checked:.6g} exceeds {terms.limit:.6g}")
            if terms.form != EQUALITY and terms.equality > terms.bound + tol:
                self._flag(k, "error-form", f"E_d={terms.equality:.6g} above its bound {terms.bound:.6g}")

        bound = self.theorem(k) if self.theorem is not None else None
        if bound is not None and self.f_star is not None and (self.theorem_at is None or self.theorem_at == k):
            achieved = gap if self.certificate else f_xhat - self.f_star
            if achieved > bound * (1.0 + THEOREM_RTOL) + 1e-12:
                self._flag(k, "theorem-bound", f"gap {achieved:.6g} > bound {bound:.6g}")

        record = GapRecord(
            k=k,
            A=cur.A,
            f_xhat=f_xhat,
            U=upper,
            L=lower,
            G=gap,
            scaled_gap=scaled,
            f_best=self._f_best,
            Ed=None if terms is None else terms.equality,
            ed_bound=None if terms is None else terms.bound,
            ed_limit=None if terms is None else terms.limit,
            ed_form=None if terms is None else terms.form,
            theorem_bound=bound,
        )
        self.records.append(record)
        return record

    @property
    def max_chain_violation(self) -> float:
        """Largest A^(k)G^(k) - A^(k-1)G^(k-1) - E_d^(k) over the run."""
        worst = -math.inf
        for prev, cur in zip(self.records, self.records[1:]):
            worst = max(worst, cur.scaled_gap - prev.scaled_gap - cur.Ed)
        return worst
