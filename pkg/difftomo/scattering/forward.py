import logging
from typing import Dict, Optional

import numpy as np
from rich.progress import track

from ..exceptions import BranchTrackingException, ParamException, SupportException
from ..geometry.path import ExperimentPath
from ..geometry.samples import FrequencySamples
from ..ndft import NodeSet, ndft_forward
from .green import green_function
from .phantom import Phantom

logger = logging.getLogger(__name__)

RYTOV_FLOOR = 1e-12


class Sinogram:
    """
    Measurements of the transverse Fourier transform of the scattered field on
    the plane r_d = r_M, one row per time t_n.

    ``data`` has shape (N,) + (M,)*(d-1); transverse nodes are stored in unit
    coordinates x_m, the physical frequency being k0(t_n) x_m. Entries of nodes
    with |x_m| >= 1 are zero and ``valid`` is False there.
    """

    def __init__(
            self,
            data,
            times,
            x_unit,
            valid,
            r_M: float,
            x_grid: str = 'uniform',
            meta: Optional[Dict] = None
    ):
        self.data = np.asarray(data, dtype=complex)
        self.times = np.asarray(times, dtype=float)
        self.x_unit = np.asarray(x_unit, dtype=float)
        self.valid = np.asarray(valid, dtype=bool)
        self.r_M = float(r_M)
        self.x_grid = x_grid
        self.meta = dict(meta or {})
        if self.data.shape[0] != len(self.times):
            raise ParamException(message='sinogram rows do not match the number of times')
        if np.any(np.diff(self.times) <= 0):
            raise ParamException(message='sinogram times must be strictly increasing')

    def __repr__(self):
        return f'<{self.__class__.__name__}> shape={self.data.shape}, r_M={self.r_M}, x_grid={self.x_grid}'

    @property
    def dim(self) -> int:
        return self.data.ndim

    @property
    def M(self) -> int:
        return self.data.shape[1]

    @property
    def N(self) -> int:
        return self.data.shape[0]

    def flat(self) -> np.ndarray:
        return self.data.reshape(self.N, -1)

    def with_data(self, data) -> 'Sinogram':
        return Sinogram(data, self.times, self.x_unit, self.valid, self.r_M, self.x_grid, self.meta)


def _check_plane(phantom: Phantom, dvec: np.ndarray, plane: float):
    if not plane > dvec[-1] + phantom.support_radius:
        raise SupportException(
            message=f'measurement plane r_d = {plane} meets the support '
                    f'(center {dvec[-1]}, radius {phantom.support_radius})'
        )


def born_forward_direct(
        phantom: Phantom,
        path: ExperimentPath,
        t: float,
        detector_points,
        progress: bool = False
) -> np.ndarray:
    """
    Scattered field at the detector points by midpoint quadrature of the Born
    convolution u = (k0^2 (f o Psi_t) u_inc) * G.

    With Psi_t(r) = R(t)(r - d(t)) the grid point q of the object sits at
    R(t)^T q + d(t) in the laboratory, so

        u(r) = h^d k0^2 sum_q f(q) e^{i k0 s . (R^T q + d)} G(r - R^T q - d).

    Parameters
    ----------
    phantom: Phantom
    path: ExperimentPath
    t: float
    detector_points: array-like
        Shape (n, d), all strictly above the support in the last coordinate.
    progress: bool

    Returns
    -------
    np.ndarray
        n complex field values.
    """
    R, s, k0, dvec = path.state(t)
    points = np.asarray(detector_points, dtype=float).reshape(-1, phantom.dim)
    for plane in np.unique(points[:, -1]):
        _check_plane(phantom, dvec, plane)
    flat = phantom.values.reshape(-1)
    keep = np.abs(flat) >= 1e-14
    sources = phantom.points()[keep] @ R + dvec
    weights = phantom.spacing ** phantom.dim * k0 ** 2 * flat[keep] * np.exp(1j * k0 * sources @ s)
    out = np.zeros(len(points), dtype=complex)
    if not np.any(keep):
        return out
    for i in track(range(len(points)), description='Born quadrature...', disable=not progress):
        out[i] = np.sum(weights * green_function(points[i] - sources, k0))
    return out


def forward_ndft(
        phantom: Phantom,
        path: ExperimentPath,
        M: int,
        N: int,
        r_M: Optional[float] = None,
        x_grid: str = 'uniform',
        threads: int = 1
) -> Sinogram:
    """
    Sinogram of the Born data through the Fourier diffraction theorem.

    data[n, m] = sqrt(pi/2) (i e^{i kappa r_M} / kappa) k0^2 Ff(y) e^{-i d . R^T y}
    with y = T(k0(t_n) x_m, t_n) and Ff(y) = (2 pi)^{-d/2} h^d sum_p f(r_p) e^{-i y . r_p},
    evaluated by one NDFT over all nodes.

    Parameters
    ----------
    phantom: Phantom
    path: ExperimentPath
    M: int
        Transverse points per axis.
    N: int
        Requested number of times (distributed over the smooth pieces).
    r_M: Optional[float]
        Measurement plane; defaults to the phantom's grid half-width.
    x_grid: str
        'uniform' or 'chebyshev'.
    threads: int

    Returns
    -------
    Sinogram
    """
    if path.dim != phantom.dim:
        raise ParamException(message=f'path dimension {path.dim} does not match phantom dimension {phantom.dim}')
    r_M = phantom.r_M if r_M is None else float(r_M)
    samples = FrequencySamples(path, M, N, x_grid)
    for dvec in samples.translation:
        _check_plane(phantom, dvec, r_M)
    y, index = samples.flat_nodes()
    nodes = NodeSet(-phantom.spacing * y, phantom.P)
    d = phantom.dim
    fhat = (2 * np.pi) ** (-d / 2) * phantom.spacing ** d * ndft_forward(phantom.values, nodes, threads)
    kap = samples.kappa[index]
    k0 = samples.k0[index[0]]
    phase = samples.translation_phase(-1)[index]
    flat = np.zeros(samples.kappa.shape, dtype=complex)
    flat[index] = np.sqrt(np.pi / 2) * 1j * np.exp(1j * kap * r_M) / kap * k0 ** 2 * fhat * phase
    logger.info('simulated %d frequency nodes (%d transverse nodes skipped per time)',
                len(kap), int(np.count_nonzero(~samples.valid)))
    meta = {
        'family': path.family,
        'M': M,
        'N': N,
        'skipped': int(np.count_nonzero(~samples.valid))
    }
    return Sinogram(
        flat.reshape(samples.data_shape), samples.times, samples.x_unit, samples.valid, r_M, x_grid, meta
    )


def rytov_to_born(
        u_tot,
        u_inc,
        axis: int = -1
) -> np.ndarray:
    """
    Born-equivalent data u_inc log(u_tot / u_inc) from Rytov measurements.

    The phase of the logarithm starts on the principal branch at the first
    sample along ``axis`` and is continued by unwrapping.
    """
    u_tot = np.asarray(u_tot, dtype=complex)
    u_inc = np.asarray(u_inc, dtype=complex)
    if np.any(u_inc == 0):
        raise ParamException(message='incident field vanishes')
    ratio = u_tot / u_inc
    if np.any(np.abs(ratio) < RYTOV_FLOOR):
        raise BranchTrackingException(message='total field vanishes relative to the incident field; the logarithm branch is lost')
    phase = np.unwrap(np.angle(ratio), axis=axis)
    return u_inc * (np.log(np.abs(ratio)) + 1j * phase)


def add_noise(
        sino: Sinogram,
        level: float,
        seed: int = 0
) -> Sinogram:
    """Add complex Gaussian noise of standard deviation ``level`` times the data RMS."""
    if level < 0:
        raise ParamException(message=f'noise level has to be non-negative, got {level}')
    if level == 0:
        return sino.with_data(sino.data.copy())
    rng = np.random.default_rng(seed)
    flat = sino.flat()
    valid = np.broadcast_to(sino.valid[None, :], flat.shape)
    rms = np.sqrt(np.mean(np.abs(flat[valid]) ** 2))
    noise = rng.standard_normal(flat.shape) + 1j * rng.standard_normal(flat.shape)
    noisy = flat + level * rms / np.sqrt(2) * noise * valid
    out = sino.with_data(noisy.reshape(sino.data.shape))
    out.meta['noise'] = {'level': level, 'seed': seed}
    return out
