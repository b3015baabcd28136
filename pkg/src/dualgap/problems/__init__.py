from dualgap.problems.families import FAMILIES, make_instance, make_set
from dualgap.problems.oracles import (
    Constants,
    GroundTruth,
    MonotoneOp,
    Objective,
    SaddleProblem,
    restricted_vi_gap,
)
from dualgap.problems.reference import certify, certify_monotone, make_probes, reference_solve, solve_matrix_game

__all__ = [
    "FAMILIES",
    "Constants",
    "GroundTruth",
    "MonotoneOp",
    "Objective",
    "SaddleProblem",
    "certify",
    "certify_monotone",
    "make_instance",
    "make_probes",
    "make_set",
    "reference_solve",
    "restricted_vi_gap",
    "solve_matrix_game",
]
