from dualgap.solvers.amd import AcceleratedMirrorDescentHandler, amd_step
from dualgap.solvers.asc import StronglyConvexHandler, UnconstrainedStronglyConvexHandler, asc_step
from dualgap.solvers.base import SolverHandler, SolverState
from dualgap.solvers.cmd import CompositeMirrorDescentHandler, cmd_step
from dualgap.solvers.factory import HANDLERS, get_solver
from dualgap.solvers.fw import FrankWolfeHandler, fw_step
from dualgap.solvers.gd import GradientDescentHandler, gd_step
from dualgap.solvers.md import MirrorDescentHandler, md_step
from dualgap.solvers.mp import MirrorProxHandler, mp_step
from dualgap.solvers.runner import SolverRun, default_map, default_schedule, run, theorem_params

__all__ = [
    "HANDLERS",
    "AcceleratedMirrorDescentHandler",
    "CompositeMirrorDescentHandler",
    "FrankWolfeHandler",
    "GradientDescentHandler",
    "MirrorDescentHandler",
    "MirrorProxHandler",
    "SolverHandler",
    "SolverRun",
    "SolverState",
    "StronglyConvexHandler",
    "UnconstrainedStronglyConvexHandler",
    "amd_step",
    "asc_step",
    "cmd_step",
    "default_map",
    "default_schedule",
    "fw_step",
    "gd_step",
    "md_step",
    "mp_step",
    "run",
    "theorem_params",
]
