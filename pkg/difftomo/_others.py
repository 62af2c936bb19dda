from typing import Tuple

import numpy as np


def sgn(t: float) -> float:
    # sgn(0) = 0
    if t > 0:
        return 1.0
    if t < 0:
        return -1.0
    return 0.0


def _as_points(
        x,
        width: int
) -> Tuple[np.ndarray, bool]:
    """
    Bring a single vector or a stack of vectors into shape (n, width).

    Returns
    -------
    Tuple[np.ndarray, bool]
        The stacked points and whether a single vector was passed.
    """
    arr = np.asarray(x, dtype=float)
    if arr.ndim <= 1:
        return arr.reshape(1, width), True
    return arr.reshape(-1, width), False


def _to_single(result, single: bool):
    if single:
        return result[0]
    return result


def grid_indices(P: int) -> np.ndarray:
    """The index set {-P/2, ..., P/2 - 1}."""
    return np.arange(P) - P // 2
