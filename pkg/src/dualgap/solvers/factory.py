from typing import Type

from dualgap.errors import UnknownSetting
from dualgap.solvers.amd import AcceleratedMirrorDescentHandler
from dualgap.solvers.asc import StronglyConvexHandler, UnconstrainedStronglyConvexHandler
from dualgap.solvers.base import SolverHandler
from dualgap.solvers.cmd import CompositeMirrorDescentHandler
from dualgap.solvers.fw import FrankWolfeHandler
from dualgap.solvers.gd import GradientDescentHandler
from dualgap.solvers.md import MirrorDescentHandler
from dualgap.solvers.mp import MirrorProxHandler

HANDLERS = {
    "md": MirrorDescentHandler,
    "mp": MirrorProxHandler,
    "cmd": CompositeMirrorDescentHandler,
    "amd": AcceleratedMirrorDescentHandler,
    "gd": GradientDescentHandler,
    "asc": StronglyConvexHandler,
    "asc-unconstrained": UnconstrainedStronglyConvexHandler,
    "fw": FrankWolfeHandler,
}


def get_solver(tag: str) -> Type[SolverHandler]:
    """Return the handler class for an algorithm tag."""
    handler = HANDLERS.get(tag.lower())
    if handler is None:
        raise UnknownSetting(f"Unknown algorithm '{tag}', expected one of {sorted(HANDLERS)}")
    return handler
