import numpy as np
from scipy.special import hankel1

from ..exceptions import ParamException, SingularityException


def green_function(
        r,
        k0: float,
        dim: int = None
):
    """
    Outgoing free-space Green's function of the Helmholtz operator.

    d = 1: i e^{i k0 |r|} / (2 k0)
    d = 2: (i/4) H_0^(1)(k0 |r|)
    d = 3: e^{i k0 |r|} / (4 pi |r|)

    Parameters
    ----------
    r: array-like
        A point of shape (d,) or a stack of shape (..., d). In d = 1 plain
        scalars are accepted.
    k0: float
        Wave number.
    dim: int
        Dimension; taken from the last axis of ``r`` when omitted.
    """
    r = np.asarray(r, dtype=float)
    if dim is None:
        dim = 1 if r.ndim == 0 else r.shape[-1]
    dist = np.abs(r) if (dim == 1 and (r.ndim == 0 or r.shape[-1] != 1)) else np.linalg.norm(r, axis=-1)
    if np.any(dist == 0):
        raise SingularityException(message="Green's function is singular at r = 0")
    if dim == 1:
        return 1j * np.exp(1j * k0 * dist) / (2 * k0)
    if dim == 2:
        return 0.25j * hankel1(0, k0 * dist)
    if dim == 3:
        return np.exp(1j * k0 * dist) / (4 * np.pi * dist)
    raise ParamException(message=f"Green's function is only available for d <= 3, got {dim}")


def plane_wave(
        r,
        k0: float,
        s
):
    """Incident field e^{i k0 s . r}."""
    s = np.asarray(s, dtype=float)
    if abs(np.linalg.norm(s) - 1) > 1e-12:
        raise ParamException(message='incidence direction must be a unit vector')
    return np.exp(1j * k0 * (np.asarray(r, dtype=float) @ s))
