import numpy as np

from .._others import _as_points, _to_single, sgn
from ..exceptions import BreakpointException, DomainException, SingularityException
from .path import ExperimentPath

KAPPA_TOL = 1e-12


def kappa(x, k0: float):
    """
    sqrt(k0^2 - |x|^2), continued as i*sqrt(|x|^2 - k0^2) beyond |x| = k0.

    ``x`` is a transverse vector (or a stack of them along the leading axes);
    the norm runs over the last axis. Scalars are treated as d = 2 frequencies.
    """
    x = np.asarray(x, dtype=float)
    norm2 = x * x if x.ndim == 0 else np.sum(x * x, axis=-1)
    diff = k0 * k0 - norm2
    real = np.sqrt(np.maximum(diff, 0.0))
    imag = np.sqrt(np.maximum(-diff, 0.0))
    return real + 1j * imag


def hemisphere_h(
        x,
        k0: float,
        sign: int = 1
) -> np.ndarray:
    """
    Point (x, sign * kappa(x)) on the sphere of radius k0.

    Parameters
    ----------
    x: array-like
        Shape (d-1,) or (n, d-1).
    k0: float
        Wave number.
    sign: int
        +1 for the upper, -1 for the lower hemisphere.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 0:
        x = x.reshape(1)
    norm = np.linalg.norm(x, axis=-1)
    if np.any(norm > k0 * (1 + KAPPA_TOL)):
        raise DomainException(message=f'evanescent node: |x| = {np.max(norm)} > k0 = {k0}')
    kap = np.sqrt(np.maximum(k0 * k0 - np.sum(x * x, axis=-1), 0.0))
    return np.concatenate([x, (sign * kap)[..., None]], axis=-1)


def _check_open(x: np.ndarray, k0: float, t: float):
    norm = np.linalg.norm(x, axis=-1)
    if np.any(norm >= k0):
        raise DomainException(message=f'evanescent node: |x| = {np.max(norm)} >= k0(t) = {k0} at t = {t}')


def transform_T(
        x,
        t: float,
        path: ExperimentPath
) -> np.ndarray:
    """
    T(x, t) = R(t) (h+(x, k0(t)) - k0(t) s(t)).

    ``x`` may be one transverse vector or a stack of shape (n, d-1) sharing the
    same t; the result has the matching shape with d columns.
    """
    points, single = _as_points(x, path.dim - 1)
    R, s, k0, _ = path.state(t)
    _check_open(points, k0, t)
    h = hemisphere_h(points, k0)
    return _to_single((h - k0 * s) @ R.T, single)


def transform_Tsym(
        x,
        t: float,
        path: ExperimentPath
) -> np.ndarray:
    """sgn(t) T(x, |t|) for t in [-L, L]; zero at t = 0."""
    return sgn(t) * transform_T(x, abs(t), path)


def _jacobian(points, R, s, k0, dR, ds, dk0):
    h = hemisphere_h(points, k0)
    kap = h[:, -1]
    if np.any(kap <= KAPPA_TOL * k0):
        raise SingularityException(message='Jacobian is singular on |x| = k0')
    dks = dk0 * (R @ s) + k0 * (dR @ s) + k0 * (R @ ds)
    return (k0 * dk0 - (h @ R.T) @ dks) / kap


def jacobian_det(
        x,
        t: float,
        path: ExperimentPath
) -> np.ndarray:
    """
    Determinant of the Jacobian of T at (x, t).

    det = (k0 k0' - R h . (k0 R s)') / kappa, with h = h+(x, k0(t)) and the
    derivative taken in t. Analytic path derivatives are used when the path
    carries them, central differences otherwise. |x| = k0 is singular,
    |x| > k0 leaves the domain.

    Returns
    -------
    float or np.ndarray
        Signed determinant, one per transverse point.
    """
    points, single = _as_points(x, path.dim - 1)
    piece = path.piece_at(t)
    k0 = piece.value('wavenumber', t)
    det = _jacobian(
        points,
        piece.value('rotation', t),
        piece.value('incidence', t),
        k0,
        path.d_rotation(t),
        path.d_incidence(t),
        path.d_wavenumber(t)
    )
    return _to_single(det, single)


def jacobian_det_fd(
        x,
        t: float,
        path: ExperimentPath,
        eps: float = 1e-5
) -> float:
    """
    Determinant of the central-difference Jacobian matrix of T.

    Columns 1..d-1 differentiate in x, the last column in t. The stencil must stay
    inside one smooth piece.
    """
    x = np.asarray(x, dtype=float).reshape(path.dim - 1)
    piece = path.piece_at(t)
    if t - eps < piece.start or t + eps > piece.end:
        raise BreakpointException(message=f'stencil [{t - eps}, {t + eps}] leaves the piece [{piece.start}, {piece.end}]')

    def local_T(xx, tt):
        R = piece.value('rotation', tt)
        s = piece.value('incidence', tt)
        k0 = piece.value('wavenumber', tt)
        _check_open(xx[None, :], k0, tt)
        return R @ (hemisphere_h(xx, k0) - k0 * s)

    columns = []
    for i in range(path.dim - 1):
        step = np.zeros(path.dim - 1)
        step[i] = eps
        columns.append((local_T(x + step, t) - local_T(x - step, t)) / (2 * eps))
    columns.append((local_T(x, t + eps) - local_T(x, t - eps)) / (2 * eps))
    return float(np.linalg.det(np.stack(columns, axis=1)))
