import math
from typing import Dict, Optional

import numpy as np
from scipy.spatial.transform import Rotation

from ..exceptions import ConverterException, ParamException
from .path import ExperimentPath, PathPiece, _constant

__supported_family__ = [
    'fixed',
    'angle-scan-linear',
    'angle-scan-tilt',
    'rotation-2d',
    'rotation-3d-axis',
    'wavenumber-sweep-linear',
    'piecewise'
]

# planar generator of rotations, R' = omega * J @ R
J2 = np.array([[0.0, -1.0], [1.0, 0.0]])


def rotation_2d(angle: float) -> np.ndarray:
    c, s = math.cos(angle), math.sin(angle)
    return np.array([[c, -s], [s, c]])


def _unit(dim: int, axis: int) -> np.ndarray:
    e = np.zeros(dim)
    e[axis] = 1.0
    return e


def _matrix(value, dim: int) -> np.ndarray:
    if value is None:
        return np.eye(dim)
    mat = np.asarray(value, dtype=float)
    if mat.shape != (dim, dim):
        raise ParamException(message=f'rotation has to be a {dim}x{dim} matrix')
    return mat


def _vector(value, dim: int, default=None) -> np.ndarray:
    if value is None:
        return np.array(default, dtype=float)
    vec = np.asarray(value, dtype=float).reshape(-1)
    if vec.shape != (dim,):
        raise ParamException(message=f'Expected a vector of length {dim}, got {value}')
    return vec


def _positive(params: Dict, key: str, default=None) -> float:
    value = params.get(key, default)
    if value is None:
        raise ParamException(message=f'Missing path parameter "{key}"')
    value = float(value)
    if not value > 0:
        raise ParamException(message=f'Path parameter "{key}" has to be positive, got {value}')
    return value


def _translation(params: Dict, dim: int):
    """d(t) = offset + velocity * t on the local clock."""
    offset = _vector(params.get('translation'), dim, np.zeros(dim))
    velocity = _vector(params.get('velocity'), dim, np.zeros(dim))
    return (lambda t: offset + velocity * t), _constant(velocity)


def _single(dim, length, params, family, rotation, incidence, wavenumber,
            d_rotation, d_incidence, d_wavenumber, stationary=False) -> ExperimentPath:
    translation, d_translation = _translation(params, dim)
    piece = PathPiece(
        0.0, length, dim, rotation, incidence, wavenumber, translation,
        d_rotation, d_incidence, d_wavenumber, d_translation, stationary=stationary
    )
    return ExperimentPath(dim, [piece], family=family, params=params)


def _fixed(params: Dict, dim: int) -> ExperimentPath:
    k0 = _positive(params, 'k0')
    length = _positive(params, 'L', 1.0)
    R = _matrix(params.get('rotation'), dim)
    s = _vector(params.get('incidence'), dim, _unit(dim, dim - 1))
    zero_mat, zero_vec = np.zeros((dim, dim)), np.zeros(dim)
    stationary = params.get('velocity') is None
    return _single(
        dim, length, params, 'fixed',
        _constant(R), _constant(s), lambda t: k0,
        _constant(zero_mat), _constant(zero_vec), lambda t: 0.0,
        stationary=stationary
    )


def _angle_scan_linear(params: Dict, dim: int) -> ExperimentPath:
    # s(t) = cos(theta) e_1 + sin(theta) e_d with theta linear in t
    k0 = _positive(params, 'k0')
    length = _positive(params, 'L', math.pi)
    theta0 = float(params.get('theta0', 0.0))
    theta1 = float(params.get('theta1', theta0 + length))
    rate = (theta1 - theta0) / length
    R = _matrix(params.get('rotation'), dim)
    e1, ed = _unit(dim, 0), _unit(dim, dim - 1)

    def incidence(t):
        theta = theta0 + rate * t
        return math.cos(theta) * e1 + math.sin(theta) * ed

    def d_incidence(t):
        theta = theta0 + rate * t
        return rate * (-math.sin(theta) * e1 + math.cos(theta) * ed)

    return _single(
        dim, length, params, 'angle-scan-linear',
        _constant(R), incidence, lambda t: k0,
        _constant(np.zeros((dim, dim))), d_incidence, lambda t: 0.0
    )


def _angle_scan_tilt(params: Dict, dim: int) -> ExperimentPath:
    # s(t) = s0 / |s0| with s0 = (t - c) e_1 + e_d
    k0 = _positive(params, 'k0')
    length = _positive(params, 'L')
    center = float(params.get('center', length / 2))
    R = _matrix(params.get('rotation'), dim)
    e1, ed = _unit(dim, 0), _unit(dim, dim - 1)

    def incidence(t):
        s0 = (t - center) * e1 + ed
        return s0 / np.linalg.norm(s0)

    def d_incidence(t):
        s0 = (t - center) * e1 + ed
        norm = np.linalg.norm(s0)
        s = s0 / norm
        return (e1 - s * s[0]) / norm

    return _single(
        dim, length, params, 'angle-scan-tilt',
        _constant(R), incidence, lambda t: k0,
        _constant(np.zeros((dim, dim))), d_incidence, lambda t: 0.0
    )


def _rotation_2d(params: Dict, dim: int) -> ExperimentPath:
    if dim != 2:
        raise ParamException(message='rotation-2d needs dim = 2')
    k0 = _positive(params, 'k0')
    length = _positive(params, 'L', 2 * math.pi)
    omega = float(params.get('omega', 1.0))
    phase = float(params.get('phase', 0.0))
    s = _vector(params.get('incidence'), dim, _unit(dim, 1))

    def rotation(t):
        return rotation_2d(omega * t + phase)

    def d_rotation(t):
        return omega * J2 @ rotation_2d(omega * t + phase)

    return _single(
        dim, length, params, 'rotation-2d',
        rotation, _constant(s), lambda t: k0,
        d_rotation, _constant(np.zeros(dim)), lambda t: 0.0
    )


def _rotation_3d_axis(params: Dict, dim: int) -> ExperimentPath:
    if dim != 3:
        raise ParamException(message='rotation-3d-axis needs dim = 3')
    k0 = _positive(params, 'k0')
    length = _positive(params, 'L', 2 * math.pi)
    omega = float(params.get('omega', 1.0))
    axis = _vector(params.get('axis'), dim, _unit(dim, 0))
    if np.linalg.norm(axis) == 0:
        raise ParamException(message='rotation axis must not vanish')
    axis = axis / np.linalg.norm(axis)
    s = _vector(params.get('incidence'), dim, _unit(dim, 2))
    # cross-product matrix of the axis
    K = np.array([
        [0.0, -axis[2], axis[1]],
        [axis[2], 0.0, -axis[0]],
        [-axis[1], axis[0], 0.0]
    ])

    def rotation(t):
        return Rotation.from_rotvec(axis * omega * t).as_matrix()

    def d_rotation(t):
        return omega * K @ rotation(t)

    return _single(
        dim, length, params, 'rotation-3d-axis',
        rotation, _constant(s), lambda t: k0,
        d_rotation, _constant(np.zeros(dim)), lambda t: 0.0
    )


def _wavenumber_sweep_linear(params: Dict, dim: int) -> ExperimentPath:
    k_start = _positive(params, 'k_start')
    k_end = _positive(params, 'k_end')
    length = _positive(params, 'L', 1.0)
    rate = (k_end - k_start) / length
    R = _matrix(params.get('rotation'), dim)
    s = _vector(params.get('incidence'), dim, _unit(dim, dim - 1))
    return _single(
        dim, length, params, 'wavenumber-sweep-linear',
        _constant(R), _constant(s), lambda t: k_start + rate * t,
        _constant(np.zeros((dim, dim))), _constant(np.zeros(dim)), lambda t: rate
    )


def _piecewise(params: Dict, dim: int) -> ExperimentPath:
    subs = params.get('pieces')
    if not subs:
        raise ParamException(message='piecewise path needs a non-empty "pieces" list')
    paths = []
    for sub in subs:
        sub = dict(sub)
        sub.setdefault('dim', dim)
        paths.append(make_path(sub))
    return ExperimentPath.concatenate(paths, params=params)


_FAMILIES = {
    'fixed': _fixed,
    'angle-scan-linear': _angle_scan_linear,
    'angle-scan-tilt': _angle_scan_tilt,
    'rotation-2d': _rotation_2d,
    'rotation-3d-axis': _rotation_3d_axis,
    'wavenumber-sweep-linear': _wavenumber_sweep_linear,
    'piecewise': _piecewise
}


def make_path(
        description: Dict,
        dim: Optional[int] = None
) -> ExperimentPath:
    """
    Build an ExperimentPath from its JSON description.

    Parameters
    ----------
    description: Dict
        ``{"family": <name>, "dim": 2 | 3, ...family parameters}``.
        Every family accepts a constant ``translation`` and a ``velocity``;
        the non-rotating families accept a constant ``rotation`` matrix.
    dim: Optional[int]
        Used when the description carries no ``dim`` key.

    Returns
    -------
    ExperimentPath
    """
    family = description.get('family')
    if family not in _FAMILIES:
        raise ConverterException(
            message=f'Do not support path family "{family}". '
                    f'Supported families are: {__supported_family__}'
        )
    dim = int(description.get('dim', dim or 2))
    path = _FAMILIES[family](description, dim)
    path.family = family
    return path


def angle_rotation_path(
        k0: float = 2 * math.pi
) -> ExperimentPath:
    """
    Two half-turn angle scans, the second with the object turned by 90 degrees.

    Each piece runs its own clock over [0, pi]. The same acquisition is often
    written as one incidence sweep s(t) = (cos t, sin t) over [0, 2 pi] with
    R = I on the first half and R = -I on the second; it covers the same four
    disks B(+-k0 e1), B(+-k0 e2), which ``indicatrix_analytic_anglerot``
    counts. Build that form with ``make_path`` and two 'angle-scan-linear'
    pieces if the single clock matters.
    """
    first = {'family': 'angle-scan-linear', 'dim': 2, 'k0': k0, 'L': math.pi}
    second = dict(first, rotation=rotation_2d(math.pi / 2).tolist())
    return make_path({'family': 'piecewise', 'dim': 2, 'pieces': [first, second]})


def two_scan_path(
        k0: float = 2 * math.pi,
        half_length: float = 2.4
) -> ExperimentPath:
    """
    Two tilt scans s0(t) = (t - c, 1); after the first scan the object is turned
    by 90 degrees, which makes the path discontinuous at t = half_length.
    """
    first = {'family': 'angle-scan-tilt', 'dim': 2, 'k0': k0, 'L': half_length, 'center': half_length / 2}
    second = dict(first, rotation=[[0.0, 1.0], [-1.0, 0.0]])
    return make_path({'family': 'piecewise', 'dim': 2, 'pieces': [first, second]})


def dual_axis_path(
        k0: float = 2 * math.pi
) -> ExperimentPath:
    """
    A full turn about e_1 under incidence e_2, then one about e_2 under
    incidence e_1. Each turn covers one solid horn torus exactly once.
    """
    first = {'family': 'rotation-3d-axis', 'dim': 3, 'k0': k0, 'axis': [1, 0, 0], 'incidence': [0, 1, 0]}
    second = dict(first, axis=[0, 1, 0], incidence=[1, 0, 0])
    return make_path({'family': 'piecewise', 'dim': 3, 'pieces': [first, second]})
