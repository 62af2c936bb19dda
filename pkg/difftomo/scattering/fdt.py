"""
Checks of the Fourier diffraction theorem against the direct Born quadrature.
"""
import logging
from typing import Dict

import numpy as np
from rich.progress import track
from scipy.signal.windows import tukey

from .._others import grid_indices
from ..exceptions import ParamException, SingularityException
from ..geometry.families import make_path
from ..geometry.path import ExperimentPath
from ..geometry.samples import transverse_grid
from .forward import Sinogram, born_forward_direct
from .phantom import Phantom

logger = logging.getLogger(__name__)


def _fourier(values: np.ndarray, coords: np.ndarray, spacing: float, k: np.ndarray) -> complex:
    """(2 pi)^{-d/2} h^d sum_p g(r_p) e^{-i k . r_p}, k possibly complex."""
    d = coords.shape[-1]
    return (2 * np.pi) ** (-d / 2) * spacing ** d * np.sum(values * np.exp(-1j * (coords @ k)))


def generalized_fdt_rhs(
        g,
        spacing: float,
        x,
        r_d: float,
        k0: float
) -> complex:
    """
    Transverse Fourier transform of u = g * G on the plane at height r_d.

    The source is split at the plane: the part below radiates upwards and is
    evaluated at h+(x), the part on or above it (y_d >= r_d) at h-(x):

        sqrt(pi/2) (i/kappa) (e^{i kappa r_d} F[(1-chi) g](h+) + e^{-i kappa r_d} F[chi g](h-))

    Parameters
    ----------
    g: array-like
        Source samples on the grid spacing * p, p in {-P/2, ..., P/2-1}^d,
        d in {1, 2, 3}.
    spacing: float
    x: array-like
        Transverse frequency in R^{d-1}; empty for d = 1. |x| > k0 uses the
        imaginary branch of kappa.
    r_d: float
    k0: float

    Returns
    -------
    complex
    """
    g = np.asarray(g)
    d = g.ndim
    x = np.asarray(x, dtype=float).reshape(d - 1)
    diff = k0 * k0 - float(np.sum(x * x))
    if diff == 0:
        raise SingularityException(message='generalized FDT is singular on |x| = k0')
    kap = np.sqrt(diff) if diff > 0 else 1j * np.sqrt(-diff)
    axis = spacing * grid_indices(g.shape[0])
    coords = np.stack([c.reshape(-1) for c in np.meshgrid(*([axis] * d), indexing='ij')], axis=-1)
    values = g.reshape(-1)
    upper = coords[:, -1] >= r_d
    h_plus = np.concatenate([x, [kap]]).astype(complex)
    h_minus = np.concatenate([x, [-kap]]).astype(complex)
    below = _fourier(np.where(upper, 0, values), coords, spacing, h_plus)
    above = _fourier(np.where(upper, values, 0), coords, spacing, h_minus)
    return np.sqrt(np.pi / 2) * 1j / kap * (np.exp(1j * kap * r_d) * below + np.exp(-1j * kap * r_d) * above)


def detector_line(
        r_M: float,
        spacing: float,
        halfwidth: float
) -> np.ndarray:
    """Detector samples (x', r_M) with x' in [-halfwidth, halfwidth]."""
    n = int(round(halfwidth / spacing))
    xs = spacing * np.arange(-n, n + 1)
    return np.stack([xs, np.full_like(xs, r_M)], axis=-1)


def transverse_transform(
        u,
        detector: np.ndarray,
        spacing: float,
        xs
) -> np.ndarray:
    """
    (2 pi)^{-1/2} integral u(x', r_M) e^{-i x x'} dx' by a Riemann sum over a
    Tukey-tapered detector line.
    """
    u = np.asarray(u) * tukey(len(u), alpha=0.3)
    return (2 * np.pi) ** -0.5 * spacing * np.exp(-1j * np.outer(xs, detector[:, 0])) @ u


def born_sinogram(
        phantom: Phantom,
        path: ExperimentPath,
        M: int,
        N: int,
        r_M: float = None,
        x_grid: str = 'uniform',
        detector_spacing: float = 0.125,
        detector_halfwidth: float = 100.0,
        progress: bool = False
) -> Sinogram:
    """
    Sinogram from the direct Born quadrature: the scattered field is computed on
    a detector line for every time and transformed along it. 2D only; the cost
    is O(P^2) per detector sample.
    """
    if phantom.dim != 2 or path.dim != 2:
        raise ParamException(message='the direct Born sinogram is implemented for d = 2')
    r_M = phantom.r_M if r_M is None else float(r_M)
    times, _ = path.time_grid(N)
    x_unit, _, valid = transverse_grid(M, 2, x_grid)
    detector = detector_line(r_M, detector_spacing, detector_halfwidth)
    data = np.zeros((len(times), M), dtype=complex)
    for n, t in enumerate(track(times, description='Direct Born...', disable=not progress)):
        u = born_forward_direct(phantom, path, t, detector)
        k0 = path.wavenumber(t)
        data[n, valid] = transverse_transform(u, detector, detector_spacing, k0 * x_unit[valid, 0])
    meta = {'family': path.family, 'M': M, 'N': N, 'oracle': True}
    return Sinogram(data, times, x_unit, valid, r_M, x_grid, meta)


def fdt_check(
        phantom: Phantom,
        k0: float,
        r_M: float = None,
        detector_spacing: float = 0.125,
        detector_halfwidth: float = 100.0,
        x_fraction: float = 0.7,
        n_x: int = 57,
        bands: int = 7,
        progress: bool = False
) -> Dict:
    """
    Compare the transverse Fourier transform of directly computed Born data with
    sqrt(pi/2) i e^{i kappa r_M} k0^2 / kappa Ff(h+ - k0 e_2) for a fixed 2D setup.

    The detector line is truncated with a Tukey taper. Both sides use the same
    grid quadrature of f, so the residual error comes from the detector sampling.

    Returns
    -------
    Dict
        ``x``, ``measured``, ``predicted``, the overall relative l2 ``error`` and
        per-band errors in ``bands`` as (lo, hi, error) over |x| / k0.
    """
    if phantom.dim != 2:
        raise ParamException(message='the FDT check is implemented for d = 2')
    r_M = phantom.r_M if r_M is None else float(r_M)
    path = make_path({'family': 'fixed', 'dim': 2, 'k0': k0})
    detector = detector_line(r_M, detector_spacing, detector_halfwidth)
    u = born_forward_direct(phantom, path, 0.0, detector, progress=progress)
    xs = np.linspace(-x_fraction * k0, x_fraction * k0, n_x)
    kap = np.sqrt(k0 * k0 - xs * xs)
    measured = transverse_transform(u, detector, detector_spacing, xs)

    coords = phantom.points()
    values = phantom.values.reshape(-1)
    predicted = np.empty(n_x, dtype=complex)
    for i, (x, k) in enumerate(zip(xs, kap)):
        y = np.array([x, k - k0])
        predicted[i] = np.sqrt(np.pi / 2) * 1j * np.exp(1j * k * r_M) / k * k0 ** 2 * _fourier(values, coords, phantom.spacing, y)

    error = float(np.linalg.norm(measured - predicted) / np.linalg.norm(predicted))
    edges = np.linspace(0, x_fraction, bands + 1)
    ratio = np.abs(xs) / k0
    table = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (ratio >= lo) & (ratio <= hi)
        if np.any(sel):
            band = float(np.linalg.norm(measured[sel] - predicted[sel]) / np.linalg.norm(predicted[sel]))
            table.append((float(lo), float(hi), band))
    logger.info('FDT check: relative error %.4f', error)
    return {
        'x': xs,
        'measured': measured,
        'predicted': predicted,
        'error': error,
        'bands': table
    }
