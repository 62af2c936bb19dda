import logging
from typing import Tuple

import numpy as np

from ..exceptions import ConverterException, ParamException
from .path import ExperimentPath
from .transform import jacobian_det, transform_T

logger = logging.getLogger(__name__)

__supported_x_grid__ = ['uniform', 'chebyshev']

# transverse nodes this close to the unit sphere are dropped (kappa -> 0)
RING_CUTOFF = 1e-9


def _axis_grid(M: int, x_grid: str) -> Tuple[np.ndarray, np.ndarray]:
    if x_grid == 'uniform':
        nodes = 2.0 / M * (np.arange(M) - M // 2)
        cells = np.full(M, 2.0 / M)
    elif x_grid == 'chebyshev':
        m = np.arange(M)
        nodes = np.cos(np.pi * m / M)
        # (x_{m-1} - x_{m+1}) / 2 in closed form
        cells = np.sin(np.pi * m / M) * np.sin(np.pi / M)
    else:
        raise ConverterException(message=f'Do not support x_grid "{x_grid}". Supported: {__supported_x_grid__}')
    return nodes, cells


def transverse_grid(
        M: int,
        dim: int,
        x_grid: str = 'uniform'
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Transverse quadrature nodes in the unit ball B^{d-1}.

    Parameters
    ----------
    M: int
        Points per transverse axis.
    dim: int
        Spatial dimension d; d = 3 uses the tensor grid of M x M points.
    x_grid: str
        'uniform' for (2/M){-M/2, ..., M/2-1}, 'chebyshev' for cos(pi m / M).

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        Nodes of shape (M^{d-1}, d-1), their cell measures in unit-ball
        coordinates and a mask of the nodes with |x| < 1 - 1e-9.
    """
    if M < 2:
        raise ParamException(message=f'M has to be at least 2, got {M}')
    nodes, cells = _axis_grid(M, x_grid)
    axes = [nodes] * (dim - 1)
    grids = np.meshgrid(*axes, indexing='ij')
    points = np.stack([g.reshape(-1) for g in grids], axis=-1)
    cell_grids = np.meshgrid(*([cells] * (dim - 1)), indexing='ij')
    measure = np.prod(np.stack([c.reshape(-1) for c in cell_grids], axis=-1), axis=-1)
    valid = np.linalg.norm(points, axis=-1) < 1 - RING_CUTOFF
    return points, measure, valid


class FrequencySamples:
    """
    The nonuniform Fourier nodes y = T(k0(t_n) x_m, t_n) of a sampled experiment.

    Arrays are indexed [n, m] with m running over the flattened transverse grid;
    entries of dropped transverse nodes are zero and ``valid[m]`` is False.
    """

    def __init__(
            self,
            path: ExperimentPath,
            M: int,
            N: int,
            x_grid: str = 'uniform'
    ):
        self.path = path
        self.M = M
        self.N = N
        self.x_grid = x_grid
        self.times, self.dt = path.time_grid(N)
        self.x_unit, self.cell, self.valid = transverse_grid(M, path.dim, x_grid)
        dropped = int(np.count_nonzero(~self.valid))
        if dropped:
            logger.debug('dropped %d transverse nodes on or outside the unit sphere', dropped)

        n_t, n_x, dim = len(self.times), len(self.x_unit), path.dim
        self.k0 = np.empty(n_t)
        self.rotation = np.empty((n_t, dim, dim))
        self.incidence = np.empty((n_t, dim))
        self.translation = np.empty((n_t, dim))
        self.y = np.zeros((n_t, n_x, dim))
        self.kappa = np.zeros((n_t, n_x))
        self.jac = np.zeros((n_t, n_x))
        xs = self.x_unit[self.valid]
        for n, t in enumerate(self.times):
            R, s, k0, dvec = path.state(t)
            self.k0[n] = k0
            self.rotation[n] = R
            self.incidence[n] = s
            self.translation[n] = dvec
            x = k0 * xs
            self.y[n, self.valid] = transform_T(x, t, path)
            self.kappa[n, self.valid] = np.sqrt(k0 * k0 - np.sum(x * x, axis=-1))
            self.jac[n, self.valid] = np.abs(jacobian_det(x, t, path))

    def __repr__(self):
        return f'<{self.__class__.__name__}> M={self.M}, N={len(self.times)}, x_grid={self.x_grid}'

    @property
    def dim(self) -> int:
        return self.path.dim

    @property
    def data_shape(self) -> Tuple[int, ...]:
        return (len(self.times),) + (self.M,) * (self.dim - 1)

    def quadrature(self) -> np.ndarray:
        """Weight per node: cell measure of k0 * x_m times the time step."""
        return (self.cell[None, :] * self.k0[:, None] ** (self.dim - 1)) * self.dt[:, None] * self.valid[None, :]

    def translation_phase(self, sign: int = -1) -> np.ndarray:
        """exp(sign * i * dvec(t_n) . R(t_n)^T y_{n,m})."""
        local = np.einsum('nij,nmi->nmj', self.rotation, self.y)
        return np.exp(sign * 1j * np.einsum('nj,nmj->nm', self.translation, local))

    def flat_nodes(self) -> Tuple[np.ndarray, np.ndarray]:
        """Valid nodes as an (J, d) array plus their (n, m) index pairs."""
        mask = np.broadcast_to(self.valid[None, :], self.kappa.shape)
        index = np.nonzero(mask)
        return self.y[index], index
