"""Conjugate-gradient oracle and Bregman divergences over any map."""
import numpy as np

from dualgap.errors import NonFinite
from dualgap.mirror_maps.timevarying import as_time_varying


def _checked(z) -> np.ndarray:
    z = np.asarray(z, dtype=float)
    if not np.all(np.isfinite(z)):
        raise NonFinite("Dual vector contains NaN or Inf")
    return z


def grad_conjugate(map_, z) -> np.ndarray:
    """argmin over the set of -<z, x> + phi_t(x)."""
    return as_time_varying(map_).grad_conjugate(_checked(z))


def bregman(map_, x, y) -> float:
    """D_phi(x, y) = phi(x) - phi(y) - <grad phi(y), x - y>."""
    return as_time_varying(map_).bregman(np.asarray(x, dtype=float), np.asarray(y, dtype=float))


def bregman_dual(map_, z1, z2) -> float:
    """D_{phi*}(z1, z2), evaluated through the primal points of z1 and z2."""
    tv = as_time_varying(map_)
    z1 = _checked(z1)
    x1 = tv.grad_conjugate(z1)
    x2 = tv.grad_conjugate(_checked(z2))
    return float(tv.value(x2) - tv.value(x1) - np.dot(z1, x2 - x1))


def conjugate(map_, z) -> float:
    """phi_t*(z) = <z, x> - phi_t(x) at x = grad phi_t*(z)."""
    return as_time_varying(map_).conjugate(_checked(z))
