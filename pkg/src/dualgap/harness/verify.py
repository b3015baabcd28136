"""Verification suite: every tracked invariant and acceptance property as a tagged check.

Checks register themselves with ``@check(tag)``; ``verify_suite`` runs the
selected ones on a thread pool and collects pass/fail entries. A check
passes by returning a short detail string and fails by raising.
"""
import logging
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from dualgap.config import parse_config
from dualgap.continuous import AlphaSpec, averaging_residual, integrate, scaled_gap_violation
from dualgap.errors import ConfigError
from dualgap.gap_tracker import fenchel_lower_bound, lower_bound, theorem_bound
from dualgap.gap_tracker import schedule as schedules
from dualgap.harness.experiment import run_experiment
from dualgap.harness.rates import fit_rate
from dualgap.harness.traces import read_trace
from dualgap.mirror_maps import (
    CompositePart,
    FeasibleSet,
    TimeVaryingMap,
    bregman,
    bregman_dual,
    conjugate,
    grad_conjugate,
    make_map,
)
from dualgap.problems import Constants, Objective, make_instance, restricted_vi_gap
from dualgap.saddle import solve_saddle, solve_vi
from dualgap.solvers import run

logger = logging.getLogger(__name__)

TAGS = (
    "bregman",
    "conjugate",
    "problems",
    "schedules",
    "tracker",
    "discrete",
    "equivalence",
    "rates",
    "continuous",
    "saddle",
    "mutation",
    "harness",
)
THREADS_ENV = "DUALGAP_THREADS"

RANDOM_CASES = 200
DOMINANCE_SEEDS = range(5)
DOMINANCE_K = 1000
RATE_K = 1000
# A^(k) grows geometrically; past ~2^40 the scaled gap drowns in rounding of A*U and A*L
LINEAR_RATE_K = 40
CONTINUOUS_H = 1e-2

# instance descriptors shared by several checks
QUADRATIC = {"family": "quadratic", "diag": [1.0, 4.0], "b": [1.0, 4.0]}
RANDOM_QUADRATIC = {"family": "quadratic", "dim": 5}
SIMPLEX_QUADRATIC = {"family": "simplex-quadratic", "dim": 5}
CUBE_QUADRATIC = {"family": "quadratic", "diag": [1.0, 1.0, 1.0], "minimizer": [0.5, 0.5, 0.5],
                  "set": {"kind": "box", "lower": 0.0, "upper": 1.0}}
HUBER = {"family": "huber", "dim": 3}
HUBER_1D = {"family": "huber", "weights": [1.0], "center": [1.0], "set": {"kind": "box", "half_width": 2.0}}
LASSO = {"family": "lasso", "dim": 4, "set": {"kind": "box", "half_width": 1.0}}
LASSO_1D = {"family": "lasso", "matrix": [[1.0]], "target": [3.0], "lam": 1.0,
            "set": {"kind": "box", "half_width": 2.0}}
BILINEAR = {"family": "bilinear"}
RANDOM_BILINEAR = {"family": "bilinear", "random": True, "v_dim": 2, "w_dim": 2}
MATCHING_PENNIES = {"family": "matrix-game", "matrix": [[1.0, -1.0], [-1.0, 1.0]]}


@dataclass(frozen=True)
class CheckResult:
    name: str
    tag: str
    passed: bool
    detail: str
    seconds: float


@dataclass
class VerifyReport:
    results: List[CheckResult]

    @property
    def passed(self) -> bool:
        return all(result.passed for result in self.results)

    @property
    def failures(self) -> List[CheckResult]:
        return [result for result in self.results if not result.passed]

    def as_dict(self) -> Dict:
        return {
            "passed": self.passed,
            "total": len(self.results),
            "failed": len(self.failures),
            "checks": [asdict(result) for result in self.results],
        }


CHECKS: Dict[str, List[Tuple[str, Callable[[], str]]]] = {tag: [] for tag in TAGS}


def check(tag: str):
    """Register a check under ``tag``."""

    def register(fn: Callable[[], str]) -> Callable[[], str]:
        CHECKS[tag].append((fn.__name__, fn))
        return fn

    return register


def _expect(condition: bool, message: str) -> None:
    if not condition:
        raise AssertionError(message)


def _rng(salt: int) -> np.random.Generator:
    return np.random.default_rng([2024, salt])


def _maps():
    """Map zoo for the randomized property checks."""
    return [
        make_map(FeasibleSet.rn(3), "euclidean", scale=2.0, center=[0.5, -1.0, 0.0]),
        make_map(FeasibleSet.cube(3, 1.0), "euclidean"),
        make_map(FeasibleSet.ball([0.0, 0.0, 0.0], 1.5), "euclidean", scale=0.5),
        make_map(FeasibleSet.simplex(4), "entropy"),
        make_map(FeasibleSet.simplex(4), "entropy", scale=2.0, center=[0.1, 0.2, 0.3, 0.4]),
    ]


# -- mirror maps -------------------------------------------------------------


@check("bregman")
def dual_bregman_strong_convexity() -> str:
    worst = math.inf
    for m, map_ in enumerate(_maps()):
        rng = _rng(m)
        for _ in range(RANDOM_CASES):
            z1, z2 = rng.standard_normal((2, map_.dim))
            x1, x2 = grad_conjugate(map_, z1), grad_conjugate(map_, z2)
            slack = bregman_dual(map_, z1, z2) - 0.5 * map_.strong_convexity * map_.primal_norm(x1 - x2) ** 2
            worst = min(worst, slack)
            _expect(slack >= -1e-10, f"{map_.kind} map: D_phi* below sigma/2 ||dx||^2 by {-slack:.3g}")
    return f"min slack {worst:.3g}"


@check("bregman")
def three_point_identity() -> str:
    worst = 0.0
    for m, map_ in enumerate(_maps()):
        rng = _rng(10 + m)
        for _ in range(RANDOM_CASES):
            x, y, z = rng.standard_normal((3, map_.dim))
            lhs = bregman_dual(map_, x, y)
            cross = float(np.dot(grad_conjugate(map_, z) - grad_conjugate(map_, y), x - z))
            rhs = bregman_dual(map_, z, y) + cross + bregman_dual(map_, x, z)
            worst = max(worst, abs(lhs - rhs))
    _expect(worst <= 1e-10, f"three-point identity off by {worst:.3g}")
    return f"max error {worst:.3g}"


@check("bregman")
def bregman_examples() -> str:
    euclidean = make_map(FeasibleSet.rn(2), "euclidean")
    entropy = make_map(FeasibleSet.simplex(2), "entropy")
    _expect(abs(bregman(euclidean, [1.0, 0.0], [0.0, 0.0]) - 0.5) <= 1e-15, "euclidean divergence")
    expected = 0.5 * math.log(2.0) + 0.5 * math.log(2.0 / 3.0)
    _expect(abs(bregman(entropy, [0.5, 0.5], [0.25, 0.75]) - expected) <= 1e-12, "KL divergence")
    _expect(abs(bregman_dual(euclidean, [1.0, 0.0], [0.0, 0.0]) - 0.5) <= 1e-15, "self-dual divergence")
    return "closed forms match"


@check("conjugate")
def grad_conjugate_optimality() -> str:
    worst = -math.inf
    for m, map_ in enumerate(_maps()):
        rng = _rng(20 + m)
        region = map_.feasible_set
        for _ in range(20):
            z = 2.0 * rng.standard_normal(map_.dim)
            x = grad_conjugate(map_, z)
            _expect(region.contains(x, 1e-12), f"{map_.kind} map left its set")
            probes = region.sample(rng, 100)
            residual = float(np.max((probes - x) @ (z - map_.gradient(x))))
            worst = max(worst, residual)
    _expect(worst <= 1e-9, f"first-order residual {worst:.3g}")
    return f"max residual {worst:.3g}"


@check("conjugate")
def grad_conjugate_examples() -> str:
    rn = make_map(FeasibleSet.rn(2), "euclidean")
    np.testing.assert_allclose(grad_conjugate(rn, [3.0, -2.0]), [3.0, -2.0])
    np.testing.assert_allclose(grad_conjugate(make_map(FeasibleSet.simplex(3), "entropy"), np.zeros(3)),
                               np.full(3, 1.0 / 3.0), atol=1e-15)
    np.testing.assert_allclose(grad_conjugate(make_map(FeasibleSet.simplex(2), "entropy"), [math.log(3.0), 0.0]),
                               [0.75, 0.25], atol=1e-12)
    return "closed forms match"


@check("conjugate")
def composite_conjugates_decrease() -> str:
    rng = _rng(30)
    base = make_map(FeasibleSet.cube(3, 1.0), "euclidean")
    part = CompositePart(kind="l1", weight=0.5)
    weights = np.cumsum(rng.uniform(0.1, 1.0, 20))
    for _ in range(50):
        z = 3.0 * rng.standard_normal(3)
        values = [conjugate(TimeVaryingMap.with_composite(base, part, w), z) for w in weights]
        _expect(np.all(np.diff(values) <= 1e-12), "phi_i* increased with the composite weight")
    return f"{len(weights)} weights x 50 duals"


# -- problems and schedules --------------------------------------------------


@check("problems")
def instance_families_certify() -> str:
    descriptors = [QUADRATIC, RANDOM_QUADRATIC, SIMPLEX_QUADRATIC, HUBER, LASSO, BILINEAR, RANDOM_BILINEAR,
                   MATCHING_PENNIES, {"family": "zero"}, {"family": "zero", "operator": True}]
    for descriptor in descriptors:
        make_instance(descriptor, seed=0)
    problem, truth = make_instance(QUADRATIC)
    np.testing.assert_allclose(truth.x_star, [1.0, 1.0], atol=1e-12)
    _expect(abs(truth.f_star + 2.5) <= 1e-12, f"f* = {truth.f_star}, expected -2.5")
    return f"{len(descriptors)} families certified"


@check("problems")
def restricted_gap_examples() -> str:
    problem, _ = make_instance(BILINEAR)
    op = problem.operator()
    vertices = op.feasible_set.vertices()
    _expect(abs(restricted_vi_gap(op, np.zeros(2), vertices)) <= 1e-15, "gap at the saddle")
    _expect(abs(restricted_vi_gap(op, np.array([0.5, 0.0]), vertices) - 0.5) <= 1e-15, "gap at (0.5, 0)")
    return "bilinear probes match"


@check("schedules")
def schedule_identities() -> str:
    amd = schedules.amd(DOMINANCE_K, smooth=4.0, strong_convexity=1.0)
    unit = schedules.amd(3, smooth=1.0)
    _expect(unit.a(3) == 2.0 and unit.A(3) == 5.0, "amd a_3 = 2, A_3 = 5 at sigma = L = 1")
    _expect(all(amd.a(i) ** 2 / amd.A(i) <= 0.25 + 1e-15 for i in range(len(amd))), "amd a_i^2/A_i > sigma/L")
    asc = schedules.asc(200, kappa=4.0)
    _expect(all(asc.a(i) ** 2 / (asc.A(i) * asc.A(i - 1)) <= 0.25 + 1e-12 for i in range(1, len(asc))),
            "asc a_i^2/(A_i A_(i-1)) > sigma/L")
    fw = schedules.fw(DOMINANCE_K)
    _expect(all(fw.A(k) == (k + 1) * (k + 2) / 2 for k in range(len(fw))), "fw A_k != (k+1)(k+2)/2")
    _expect(abs(schedules.asc_ratio(4.0) - (math.sqrt(17.0) - 1.0) / 8.0) <= 1e-15, "asc ratio at kappa = 4")
    _expect(abs(schedules.asc_ratio(1.0) - 0.6180339887498949) <= 1e-15, "asc ratio at kappa = 1")
    return "amd, asc and fw identities hold"


@check("schedules")
def theorem_bound_examples() -> str:
    amd = theorem_bound("amd", 1, {"smooth": 1.0, "strong_convexity": 1.0, "bregman": 0.5})
    gd = theorem_bound("gd", 0, {"smooth": 1.0, "distance_sq": 4.0})
    _expect(abs(amd - 1.0 / 3.0) <= 1e-15, f"amd bound {amd}")
    _expect(gd == 2.0, f"gd bound {gd}")
    return "amd and gd bounds match"


# -- tracker -----------------------------------------------------------------


@check("tracker")
def tracked_gd_run() -> str:
    problem, truth = make_instance({"family": "quadratic", "diag": [1.0], "b": [0.0]})
    result = run("gd", problem, k_max=1, truth=truth, x0=[2.0])
    _expect(len(result.history) == 2, "gd history length")
    _expect(abs(float(result.history[1].x[0])) <= 1e-15, "x^(1) = x - grad f(x) = 0")
    single = run("gd", problem, k_max=0, truth=truth)
    _expect(len(single.records) == 1 and math.isfinite(single.final.G), "k_max = 0 record")
    return f"G^(1) = {result.final.G:.3g}"


@check("tracker")
def fenchel_lower_bound_identity() -> str:
    problem, truth = make_instance(QUADRATIC)
    result = run("amd", problem, k_max=30, truth=truth)
    correction = result.tracker.correction
    worst = 0.0
    for k in range(1, len(result.history)):
        direct = lower_bound("amd", result.history, correction=correction, k=k)
        dual = fenchel_lower_bound("amd", result.history, problem, correction=correction, k=k)
        worst = max(worst, abs(direct - dual) / max(1.0, abs(direct)))
    _expect(worst <= 1e-8, f"Fenchel form off by {worst:.3g}")
    return f"max relative error {worst:.3g}"


# -- discrete solvers --------------------------------------------------------


def _dominance(tag: str, descriptor: Dict) -> str:
    worst = -math.inf
    for seed in DOMINANCE_SEEDS:
        problem, truth = make_instance(descriptor, seed)
        result = run(tag, problem, k_max=DOMINANCE_K, truth=truth)
        _expect(result.tracker.theorem is not None, f"{tag}: no theorem bound applied")
        for record in result.records:
            _expect(record.f_xhat >= truth.f_star - 1e-9, f"{tag}: f(x_hat) below f* at k={record.k}")
        final = result.final
        worst = max(worst, (final.f_xhat - truth.f_star) - final.theorem_bound)
    return f"{len(DOMINANCE_SEEDS)} seeds, worst final margin {worst:.3g}"


@check("discrete")
def md_dominance() -> str:
    return _dominance("md", HUBER)


@check("discrete")
def cmd_dominance() -> str:
    return _dominance("cmd", LASSO)


@check("discrete")
def amd_dominance() -> str:
    return _dominance("amd", RANDOM_QUADRATIC)


@check("discrete")
def gd_dominance() -> str:
    return _dominance("gd", RANDOM_QUADRATIC)


@check("discrete")
def asc_dominance() -> str:
    return _dominance("asc", RANDOM_QUADRATIC)


@check("discrete")
def asc_unconstrained_dominance() -> str:
    return _dominance("asc-unconstrained", RANDOM_QUADRATIC)


@check("discrete")
def fw_dominance() -> str:
    return _dominance("fw", SIMPLEX_QUADRATIC)


@check("discrete")
def mp_dominance() -> str:
    for seed in DOMINANCE_SEEDS:
        problem, truth = make_instance(RANDOM_BILINEAR, seed)
        result = solve_vi(problem.operator(), k=DOMINANCE_K, method="mp", truth=truth)
        for record, probe_gap in zip(result.records[1:], result.probe_gaps[1:]):
            _expect(probe_gap <= record.theorem_bound * (1 + 1e-8), f"mp: probe gap above bound at k={record.k}")
    return f"{len(DOMINANCE_SEEDS)} seeds"


# -- equivalences ------------------------------------------------------------


@check("equivalence")
def gd_matches_classical() -> str:
    problem, _ = make_instance(RANDOM_QUADRATIC, seed=3)
    result = run("gd", problem, k_max=200, tracker_on=False)
    smooth = problem.constants.smooth
    x = result.history[0].x.copy()
    worst = 0.0
    for step in result.history:
        worst = max(worst, float(np.max(np.abs(step.x - x))) / (1.0 + float(np.linalg.norm(x))))
        x = x - problem.gradient(x) / smooth
    _expect(worst <= 1e-12, f"lazy and classical gradient descent differ by {worst:.3g}")
    return f"max difference {worst:.3g}"


@check("equivalence")
def cmd_without_psi_is_md() -> str:
    problem, truth = make_instance({"family": "quadratic", "dim": 4, "set": {"kind": "box", "half_width": 0.5}})
    schedule = schedules.md_decaying(300, 0.5)
    md = run("md", problem, schedule=schedule, k_max=300, truth=truth)
    cmd = run("cmd", problem, schedule=schedule, k_max=300, truth=truth)
    for a, b in zip(md.history, cmd.history):
        _expect(np.array_equal(a.x, b.x) and np.array_equal(a.x_hat, b.x_hat), f"trajectories split at k={a.i}")
    return "bit-for-bit"


@check("equivalence")
def saddle_is_vi_on_induced_operator() -> str:
    problem, truth = make_instance(RANDOM_BILINEAR, seed=1)
    saddle = solve_saddle(problem, k=200, truth=truth)
    vi = solve_vi(problem.operator(), k=200, truth=truth)
    for a, b in zip(saddle.history, vi.history):
        _expect(np.array_equal(a.x_hat, b.x_hat), f"traces split at k={a.i}")
    _expect(saddle.probe_gaps == vi.probe_gaps, "probe gaps differ")
    return "bit-for-bit"


def _half_norm_squared(region) -> Objective:
    return Objective(dim=region.dim, value=lambda x: 0.5 * float(x @ x), gradient=lambda x: np.array(x, dtype=float),
                     feasible_set=region, constants=Constants(smooth=1.0, hoelder=(1.0, 1.0)), name="half-norm")


@check("equivalence")
def fw_one_step_example() -> str:
    problem = _half_norm_squared(FeasibleSet.simplex(3))
    result = run("fw", problem, k_max=1, tracker_on=False, x0=[1.0, 0.0, 0.0])
    np.testing.assert_allclose(result.history[1].x, [1.0 / 3.0, 2.0 / 3.0, 0.0], rtol=0, atol=1e-15)
    return "(1, 0, 0) -> (1/3, 2/3, 0)"


@check("equivalence")
def mp_one_step_example() -> str:
    problem, _ = make_instance(BILINEAR)
    map_ = make_map(problem.feasible_set, "euclidean", center=[1.0, 0.0])
    result = solve_vi(problem.operator(), map_, schedules.constant(1, 0.5), k=1)
    np.testing.assert_allclose(result.history[1].x, [0.75, 1.0], rtol=0, atol=1e-15)
    return "x^(1) = (0.75, 1.0)"


# -- rates -------------------------------------------------------------------


def _exponent(records, low: float, high: float, label: str) -> str:
    fit = fit_rate([record.row() for record in records])
    _expect(low <= fit.exponent <= high, f"{label} exponent {fit.exponent:.3f} outside [{low}, {high}]")
    return f"{label} {fit.exponent:.3f}"


def _ratio(records, expected: float, label: str) -> str:
    fit = fit_rate([record.row() for record in records])
    _expect(abs(fit.ratio - expected) <= 0.05, f"{label} ratio {fit.ratio:.4f}, expected {expected:.4f}")
    return f"{label} {fit.ratio:.4f}"


@check("rates")
def sublinear_exponents() -> str:
    details = []
    problem, truth = make_instance(HUBER_1D)
    result = run("md", problem, schedule=schedules.md_decaying(RATE_K, 0.25), k_max=RATE_K, truth=truth,
                 check_theorem=False)
    details.append(_exponent(result.records, -0.65, -0.35, "md"))
    problem, truth = make_instance(LASSO_1D)
    result = run("cmd", problem, schedule=schedules.md_decaying(RATE_K, 0.25), k_max=RATE_K, truth=truth,
                 check_theorem=False)
    details.append(_exponent(result.records, -0.65, -0.35, "cmd"))
    problem, truth = make_instance(QUADRATIC)
    details.append(_exponent(run("amd", problem, k_max=RATE_K, truth=truth).records, -2.3, -1.8, "amd"))
    problem, truth = make_instance(CUBE_QUADRATIC)
    details.append(_exponent(run("fw", problem, k_max=RATE_K, truth=truth).records, -1.2, -0.8, "fw"))
    return ", ".join(details)


@check("rates")
def linear_ratios() -> str:
    problem, truth = make_instance(QUADRATIC)
    kappa = problem.constants.condition
    asc = run("asc", problem, k_max=LINEAR_RATE_K, truth=truth)
    unconstrained = run("asc-unconstrained", problem, k_max=LINEAR_RATE_K, truth=truth)
    return ", ".join([
        _ratio(asc.records, 1.0 - schedules.asc_ratio(kappa), "asc"),
        _ratio(unconstrained.records, 1.0 - 1.0 / math.sqrt(kappa), "asc-unconstrained"),
    ])


@check("rates")
def vi_exponents() -> str:
    problem, truth = make_instance(BILINEAR)
    op = problem.operator()
    map_ = make_map(op.feasible_set, "euclidean", center=[0.5, 0.5])
    mp = solve_vi(op, map_, k=RATE_K, method="mp", truth=truth)
    md = solve_vi(op, map_, schedules.md_decaying(RATE_K, 0.25), k=RATE_K, method="md", truth=truth)
    return ", ".join([
        _exponent(mp.records, -1.2, -0.8, "mp"),
        _exponent(md.records, -0.65, -0.35, "md"),
    ])


# -- continuous time ---------------------------------------------------------

CONTINUOUS_CASES = {
    "ct-md": ({"family": "quadratic", "diag": [1.0, 4.0], "b": [1.0, 4.0],
               "set": {"kind": "box", "half_width": 2.0}}, AlphaSpec()),
    "ct-gd": (QUADRATIC, AlphaSpec()),
    "ct-amd": (QUADRATIC, AlphaSpec("polynomial", power=2.0)),
    "ct-asc": (QUADRATIC, AlphaSpec()),
    "ct-cmd": ({"family": "lasso", "matrix": [[1.0]], "target": [3.0], "lam": 0.5,
                "set": {"kind": "box", "half_width": 2.0}}, AlphaSpec()),
    "ct-fw": ({"family": "simplex-quadratic", "diag": [1.0, 1.0, 1.0], "minimizer": [2.0, 0.0, 0.0]}, AlphaSpec()),
}


@check("continuous")
def gradient_flow_closed_form() -> str:
    problem, truth = make_instance({"family": "quadratic", "diag": [1.0], "b": [0.0]})
    result = integrate("ct-gd", problem, h=1e-3, T=2.0, x0=[1.0], truth=truth)
    error = abs(float(result.points[-1][0]) - math.exp(-2.0))
    _expect(error <= 1e-6, f"x(2) off e^-2 by {error:.3g}")
    return f"|x(2) - e^-2| = {error:.3g}"


@check("continuous")
def lemma_bounds() -> str:
    details = []
    for tag, (descriptor, alpha) in CONTINUOUS_CASES.items():
        problem, truth = make_instance(descriptor)
        result = integrate(tag, problem, alpha=alpha, h=CONTINUOUS_H, T=1.0, truth=truth)
        final = result.final
        f_gap = final.f_xhat - truth.f_star
        _expect(f_gap <= final.lemma_bound * (1.0 + 10.0 * CONTINUOUS_H) + 1e-12,
                f"{tag}: f-gap {f_gap:.3g} above {final.lemma_bound:.3g}")
        details.append(tag)
    return f"{len(details)} dynamics"


@check("continuous")
def scaled_gap_monotone() -> str:
    details = []
    for tag, (descriptor, alpha) in CONTINUOUS_CASES.items():
        problem, truth = make_instance(descriptor)
        coarse = scaled_gap_violation(integrate(tag, problem, alpha=alpha, h=CONTINUOUS_H, T=1.0, truth=truth))
        fine = scaled_gap_violation(integrate(tag, problem, alpha=alpha, h=CONTINUOUS_H / 2, T=1.0, truth=truth))
        _expect(fine <= 0.6 * coarse + 1e-9, f"{tag}: violation {coarse:.3g} -> {fine:.3g} did not halve")
        details.append(f"{tag} {coarse:.2g}->{fine:.2g}")
    return ", ".join(details)


@check("continuous")
def frank_wolfe_averaging() -> str:
    descriptor, alpha = CONTINUOUS_CASES["ct-fw"]
    problem, truth = make_instance(descriptor)
    residual = averaging_residual(integrate("ct-fw", problem, alpha=alpha, h=CONTINUOUS_H, T=1.0, truth=truth))
    _expect(residual <= 1e-6, f"averaging residual {residual:.3g}")
    return f"residual {residual:.3g}"


# -- saddle ------------------------------------------------------------------


@check("saddle")
def bilinear_saddle() -> str:
    problem, truth = make_instance(BILINEAR)
    result = solve_saddle(problem, k=100, truth=truth)
    distance = float(np.linalg.norm(result.x_hat))
    _expect(distance <= 0.1, f"||(v_bar, w_bar)|| = {distance:.3g}")
    _expect(min(result.probe_gaps) >= -1e-12, "negative probe gap with the saddle among the probes")
    return f"||(v_bar, w_bar)|| = {distance:.3g}"


@check("saddle")
def matching_pennies() -> str:
    problem, truth = make_instance(MATCHING_PENNIES)
    map_ = make_map(problem.feasible_set, "entropy")
    result = solve_saddle(problem, map_, k=200, truth=truth)
    np.testing.assert_allclose(result.v_bar, [0.5, 0.5], atol=0.05)
    _expect(abs(truth.f_star) <= 1e-9, f"game value {truth.f_star}")
    return f"v_bar = {np.round(result.v_bar, 4).tolist()}"


@check("saddle")
def zero_operator() -> str:
    op, truth = make_instance({"family": "zero", "operator": True})
    result = solve_vi(op, k=50, truth=truth)
    _expect(all(abs(gap) <= 1e-15 for gap in result.probe_gaps), "zero operator has a positive gap")
    return "gap 0 at every k"


@check("saddle")
def random_saddle_sandwich() -> str:
    for seed in DOMINANCE_SEEDS:
        problem, truth = make_instance(RANDOM_BILINEAR, seed)
        solve_saddle(problem, k=200, truth=truth)
    return f"{len(DOMINANCE_SEEDS)} seeds"


# -- mutation ----------------------------------------------------------------


@check("mutation")
def doubled_amd_weights() -> str:
    problem, truth = make_instance({"family": "quadratic", "diag": [1.0, 4.0], "b": [0.0, 0.0]})
    broken = schedules.amd(50, problem.constants.smooth, 1.0).scaled(2.0)
    result = run("amd", problem, schedule=broken, k_max=50, truth=truth, x0=[1.0, 1.0], strict=False,
                 check_theorem=False)
    flagged = [v for v in result.tracker.violations if v.which in ("discretization-error", "error-form", "gap-chain")]
    _expect(bool(flagged), "doubled AMD weights went unnoticed")
    return f"first flagged at k={flagged[0].k} ({flagged[0].which})"


# -- harness -----------------------------------------------------------------


@check("harness")
def trace_round_trip() -> str:
    with tempfile.TemporaryDirectory() as tmp:
        config = parse_config({"problem": {"family": "quadratic", "diag": [1.0], "b": [0.0]}, "solver": "gd",
                               "k_max": 10, "initial_point": [2.0]})
        first = run_experiment(config, f"{tmp}/a")
        second = run_experiment(config, f"{tmp}/b")
        frame = read_trace(first.trace_path)
        _expect(len(frame) == 11, f"{len(frame)} data rows, expected 11")
        for column in frame.columns:
            expected = np.array([row.get(column, math.nan) for row in first.rows], dtype=float)
            _expect(np.array_equal(frame[column].to_numpy(dtype=float), expected, equal_nan=True),
                    f"column {column} did not round-trip")
        _expect(first.trace_path.read_bytes() == second.trace_path.read_bytes(), "traces are not byte-identical")
    return "round-trip exact, deterministic"


def _threads(threads: Optional[int]) -> int:
    if threads is not None:
        return max(1, threads)
    try:
        return max(1, int(os.getenv(THREADS_ENV, "1")))
    except ValueError:
        logger.warning("Ignoring non-integer %s", THREADS_ENV)
        return 1


def _run_check(tag: str, name: str, fn: Callable[[], str]) -> CheckResult:
    started = time.perf_counter()
    try:
        detail = fn()
        passed = True
    except Exception as e:
        detail = f"{type(e).__name__}: {e}"
        passed = False
    seconds = time.perf_counter() - started
    logger.debug("%s/%s %s in %.2fs", tag, name, "passed" if passed else "FAILED", seconds)
    return CheckResult(name, tag, passed, str(detail), seconds)


def selected_tags(filter_: Optional[Iterable[str]]) -> List[str]:
    """Expand a tag filter; None, empty or 'all' selects every tag."""
    tags = [tag.strip().lower() for tag in (filter_ or []) if tag.strip()]
    if not tags or "all" in tags:
        return list(TAGS)
    unknown = sorted(set(tags) - set(TAGS))
    if unknown:
        raise ConfigError(f"Unknown verification tags {unknown}, expected some of {list(TAGS)}")
    return [tag for tag in TAGS if tag in tags]


def verify_suite(filter_: Optional[Iterable[str]] = None, threads: Optional[int] = None) -> VerifyReport:
    """Run the checks for the selected tags; failures are report entries, never exceptions."""
    jobs = [(tag, name, fn) for tag in selected_tags(filter_) for name, fn in CHECKS[tag]]
    with ThreadPoolExecutor(max_workers=_threads(threads)) as pool:
        results = list(pool.map(lambda job: _run_check(*job), jobs))
    return VerifyReport(results)
