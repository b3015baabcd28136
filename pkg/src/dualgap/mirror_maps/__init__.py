from dualgap.mirror_maps.bregman import bregman, bregman_dual, conjugate, grad_conjugate
from dualgap.mirror_maps.maps import EntropyMap, EuclideanMap, MirrorMap, ProductMap, make_map
from dualgap.mirror_maps.sets import FeasibleSet, ProductSet, project_simplex
from dualgap.mirror_maps.timevarying import CompositePart, TimeVaryingMap, as_time_varying, soft_threshold

__all__ = [
    "CompositePart",
    "EntropyMap",
    "EuclideanMap",
    "FeasibleSet",
    "MirrorMap",
    "ProductMap",
    "ProductSet",
    "TimeVaryingMap",
    "as_time_varying",
    "bregman",
    "bregman_dual",
    "conjugate",
    "grad_conjugate",
    "make_map",
    "project_simplex",
    "soft_threshold",
]
