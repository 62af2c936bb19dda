import logging
import warnings
from typing import Callable, Dict, Optional, Union

import numpy as np

from .coverage import IndicatrixField
from .exceptions import IndicatrixException, ParamException
from .geometry.path import ExperimentPath
from .geometry.samples import FrequencySamples
from .ndft import NodeSet, cg_normal_solve, ndft_hermitian
from .scattering.forward import Sinogram
from .scattering.phantom import Phantom

logger = logging.getLogger(__name__)

# default share of hit nodes allowed to stay at Card = 0 before the field is rejected
ZERO_CARD_LIMIT = 0.25

Indicatrix = Union[IndicatrixField, Callable, None]


class Volume:
    """Reconstructed f on the grid r_p = (2 r_M / P) p, with provenance in ``meta``."""

    def __init__(
            self,
            values,
            r_M: float,
            method: str,
            meta: Optional[Dict] = None
    ):
        values = np.asarray(values)
        if not np.all(np.isfinite(values)):
            raise ParamException(message='volume contains non-finite values')
        self.values = values
        self.dim = values.ndim
        self.P = values.shape[0]
        self.r_M = float(r_M)
        self.spacing = 2 * self.r_M / self.P
        self.method = method
        self.meta = dict(meta or {})
        self.meta['method'] = method

    def __repr__(self):
        return f'<{self.__class__.__name__}> method={self.method}, dim={self.dim}, P={self.P}'

    @property
    def real(self) -> np.ndarray:
        return np.real(self.values)


def _samples_for(sino: Sinogram, path: ExperimentPath) -> FrequencySamples:
    N = int(sino.meta.get('N', sino.N))
    samples = FrequencySamples(path, sino.M, N, sino.x_grid)
    if len(samples.times) != sino.N or not np.allclose(samples.times, sino.times, rtol=0, atol=1e-12 * path.horizon):
        raise ParamException(message='sinogram times do not match the time grid of the path')
    if not np.array_equal(samples.valid, sino.valid):
        raise ParamException(message='sinogram transverse grid does not match')
    return samples


def _card_at(
        y: np.ndarray,
        indicatrix: Indicatrix,
        zero_limit: float = ZERO_CARD_LIMIT
):
    """Card at the nodes and the number of lookups that had to be clamped to 1."""
    if indicatrix is None:
        return np.ones(len(y)), 0
    if callable(indicatrix) and not isinstance(indicatrix, IndicatrixField):
        card = np.asarray(indicatrix(y), dtype=float).reshape(-1)
        if np.any(card < 1):
            raise IndicatrixException(message='indicatrix callable returned values below 1 at hit nodes')
        return card, 0
    card = indicatrix.lookup(y).astype(float)
    zero = card == 0
    if np.all(zero):
        raise IndicatrixException(message='indicatrix vanishes at every node of the experiment')
    if np.any(zero):
        card[zero] = indicatrix.neighbourhood_max(y[zero])
        zero = card == 0
    clamped = int(np.count_nonzero(zero))
    if clamped > zero_limit * len(card):
        raise IndicatrixException(message=f'indicatrix is zero at {clamped} of {len(card)} hit nodes')
    if clamped:
        warnings.warn(f'indicatrix is zero at {clamped} hit nodes; clamped to 1')
        card[zero] = 1
    return card, clamped


def node_weights(
        samples: FrequencySamples,
        r_M: float,
        card=None
) -> np.ndarray:
    """
    Backpropagation weight per node, without the data and the e^{i y . r} phase:

        (2 pi)^{-(1+d)/2} dx dt 2 kappa |det| / (k0^2 i e^{i kappa r_M} Card)

    Parameters
    ----------
    samples: FrequencySamples
    r_M: float
        Measurement plane.
    card: array-like
        Card per valid node in the order of ``samples.flat_nodes()``, or per
        (n, m) entry; defaults to 1.

    Returns
    -------
    np.ndarray
        Complex (N, M^{d-1}) array, zero on dropped nodes.
    """
    d = samples.dim
    valid = np.broadcast_to(samples.valid[None, :], samples.kappa.shape)
    cards = np.ones(samples.kappa.shape)
    if card is not None:
        card = np.asarray(card, dtype=float)
        if card.shape == samples.kappa.shape:
            cards = np.where(valid, card, 1.0)
        else:
            cards[valid] = card.reshape(-1)
    kap = samples.kappa
    k0 = samples.k0[:, None]
    out = np.zeros(kap.shape, dtype=complex)
    weight = (2 * np.pi) ** (-(1 + d) / 2) * samples.quadrature() * 2 * kap * samples.jac
    denom = k0 ** 2 * 1j * np.exp(1j * kap * r_M) * cards
    out[valid] = (weight / denom)[valid]
    return out


def _backpropagate(sino, path, P, indicatrix, r_M, threads, zero_limit):
    if not 0 <= zero_limit < 1:
        raise ParamException(message=f'zero_limit has to lie in [0, 1), got {zero_limit}')
    if sino.dim != path.dim:
        raise ParamException(message='sinogram and path dimensions differ')
    r_M = sino.r_M if r_M is None else float(r_M)
    samples = _samples_for(sino, path)
    y, index = samples.flat_nodes()
    card, clamped = _card_at(y, indicatrix, zero_limit)
    weights = node_weights(samples, sino.r_M, card)
    phase = samples.translation_phase(+1)
    coeff = (weights * sino.flat() * phase)[index]
    spacing = 2 * r_M / P
    values = ndft_hermitian(coeff, NodeSet(-spacing * y, P), threads)
    meta = {
        'family': path.family,
        'M': sino.M,
        'N': sino.N,
        'x_grid': sino.x_grid,
        'clamped': clamped
    }
    logger.info('backpropagated %d nodes onto P = %d (%d clamped)', len(y), P, clamped)
    return values, r_M, meta


def backpropagate(
        sino: Sinogram,
        path: ExperimentPath,
        P: int,
        indicatrix: Indicatrix = None,
        r_M: Optional[float] = None,
        threads: int = 1,
        zero_limit: float = ZERO_CARD_LIMIT
) -> Volume:
    """
    Discrete filtered backpropagation

        f(r_p) = sum_{n,m} w_{n,m} data[n, m] e^{i d(t_n) . R(t_n)^T y} e^{i y . r_p}

    with the weights of ``node_weights``, realised as one adjoint NDFT.

    Parameters
    ----------
    sino: Sinogram
    path: ExperimentPath
        The path the sinogram was measured along.
    P: int
        Output grid size per axis.
    indicatrix: IndicatrixField, callable or None
        Card(T^-1(y)) as a raster (nearest-neighbour lookup) or a callable on
        (n, d) frequency arrays. None means Card = 1.
    r_M: Optional[float]
        Half-width of the output grid; defaults to the measurement plane.
    threads: int
    zero_limit: float
        Share of hit nodes that may keep Card = 0 after the neighbourhood
        lookup; these are clamped to 1 with a warning. 0 rejects any.

    Returns
    -------
    Volume
    """
    values, r_M, meta = _backpropagate(sino, path, P, indicatrix, r_M, threads, zero_limit)
    return Volume(values, r_M, 'bp', meta)


def backpropagate_sym(
        sino: Sinogram,
        path: ExperimentPath,
        P: int,
        indicatrix_sym: Indicatrix = None,
        r_M: Optional[float] = None,
        threads: int = 1,
        zero_limit: float = ZERO_CARD_LIMIT
) -> Volume:
    """
    Backpropagation for real f: divide by Card(Tsym^-1) and return twice the
    real part. The result is real.
    """
    if isinstance(indicatrix_sym, IndicatrixField) and not indicatrix_sym.sym:
        raise IndicatrixException(message='backpropagate_sym needs an indicatrix computed with sym = True')
    values, r_M, meta = _backpropagate(sino, path, P, indicatrix_sym, r_M, threads, zero_limit)
    return Volume(2 * values.real, r_M, 'bp-sym', meta)


def _frequency_grid(P: int, spacing: float, dim: int) -> np.ndarray:
    axis = 2 * np.pi * np.fft.fftfreq(P, spacing)
    grids = np.meshgrid(*([axis] * dim), indexing='ij')
    return np.stack([g.reshape(-1) for g in grids], axis=-1)


def fY_oracle(
        phantom: Phantom,
        mask: Union[IndicatrixField, Callable]
) -> Volume:
    """
    f restricted to the coverage in frequency: F^-1(1_Y Ff) by discrete
    Fourier transforms on the phantom grid.

    ``mask`` is an IndicatrixField (covered where the value is >= 1) or a
    callable returning truthy values on (n, d) frequency arrays.
    """
    P, d = phantom.P, phantom.dim
    spectrum = np.fft.fftn(np.fft.ifftshift(phantom.values))
    freqs = _frequency_grid(P, phantom.spacing, d)
    if isinstance(mask, IndicatrixField):
        keep = mask.lookup(freqs) >= 1
    else:
        keep = np.asarray(mask(freqs)).reshape(-1).astype(bool)
    spectrum = spectrum * keep.reshape(spectrum.shape)
    values = np.fft.fftshift(np.fft.ifftn(spectrum))
    meta = {'covered': int(np.count_nonzero(keep)), 'total': int(keep.size)}
    return Volume(values, phantom.r_M, 'oracle', meta)


def inverse_ndft_reconstruct(
        sino: Sinogram,
        path: ExperimentPath,
        P: int,
        r_M: Optional[float] = None,
        tol: float = 1e-6,
        max_iter: int = 500,
        real_constraint: bool = False,
        threads: int = 1,
        progress: bool = False
) -> Volume:
    """
    Solve A f = g in the least squares sense, where A is the NDFT onto the nodes
    y = T(z) of the experiment and

        g = data (P / 2 r_M)^d (2 pi)^{d/2} (-i sqrt(2) kappa e^{-i kappa r_M}) / (sqrt(pi) k0^2) e^{i d . R^T y}

    so that g equals sum_p f(r_p) e^{-i y . r_p}.

    Returns
    -------
    Volume
        ``meta`` carries ``converged``, ``iterations`` and the residual histories.
    """
    if sino.dim != path.dim:
        raise ParamException(message='sinogram and path dimensions differ')
    r_M = sino.r_M if r_M is None else float(r_M)
    d = path.dim
    spacing = 2 * r_M / P
    samples = _samples_for(sino, path)
    y, index = samples.flat_nodes()
    kap = samples.kappa[index]
    k0 = samples.k0[index[0]]
    scale = spacing ** (-d) * (2 * np.pi) ** (d / 2) * (-1j * np.sqrt(2) * kap * np.exp(-1j * kap * sino.r_M)) / (np.sqrt(np.pi) * k0 ** 2)
    g = sino.flat()[index] * scale * samples.translation_phase(+1)[index]
    result = cg_normal_solve(
        NodeSet(-spacing * y, P), g,
        max_iter=max_iter, tol=tol, real_constraint=real_constraint,
        threads=threads, progress=progress
    )
    meta = {
        'family': path.family,
        'M': sino.M,
        'N': sino.N,
        'x_grid': sino.x_grid,
        'tol': tol,
        'converged': result.converged,
        'iterations': result.iterations,
        'residuals': result.residuals,
        'normal_residuals': result.normal_residuals
    }
    return Volume(result.x, r_M, 'inverse-ndft', meta)
