import math
import warnings
from typing import Dict, List, Optional

import numpy as np

from .._others import grid_indices
from ..exceptions import ConverterException, ParamException, SupportException

__supported_generator__ = ['gaussian-blob', 'disk', 'shepp-like', 'single-voxel']

ZERO_TOL = 1e-14

# composite of ellipses in units of r_M: center, semi-axes, amplitude, angle
SHEPP_LIKE = [
    {'center': [0.0, 0.0], 'axes': [0.55, 0.7], 'amplitude': 1.0, 'angle': 0.0},
    {'center': [0.0, -0.02], 'axes': [0.5, 0.64], 'amplitude': -0.6, 'angle': 0.0},
    {'center': [0.18, 0.0], 'axes': [0.09, 0.25], 'amplitude': -0.2, 'angle': -0.3},
    {'center': [-0.18, 0.0], 'axes': [0.12, 0.3], 'amplitude': -0.2, 'angle': 0.3},
    {'center': [0.0, 0.3], 'axes': [0.16, 0.2], 'amplitude': 0.3, 'angle': 0.0},
    {'center': [0.0, -0.4], 'axes': [0.05, 0.05], 'amplitude': 0.3, 'angle': 0.0}
]


class Phantom:
    """
    Scattering potential f sampled on the uniform grid r_p = (2 r_M / P) p,
    p in {-P/2, ..., P/2-1}^d, in ``ij`` axis order.

    Values outside the ball of radius ``support_radius`` are set to zero; a
    warning is emitted when this discards anything.
    """

    def __init__(
            self,
            values,
            r_M: float,
            support_radius: float,
            meta: Optional[Dict] = None
    ):
        values = np.asarray(values)
        if values.ndim not in (2, 3) or len(set(values.shape)) != 1:
            raise ParamException(message=f'Phantom values must be a P^d array with d in (2, 3), got {values.shape}')
        if not 0 < support_radius < r_M:
            raise SupportException(message=f'support radius {support_radius} has to lie in (0, r_M = {r_M})')
        self.dim = values.ndim
        self.P = values.shape[0]
        self.r_M = float(r_M)
        self.spacing = 2 * self.r_M / self.P
        self.support_radius = float(support_radius)
        self.meta = dict(meta or {})
        outside = self.radius() > self.support_radius
        values = values.astype(complex if np.iscomplexobj(values) else float)
        if np.any(np.abs(values[outside]) >= ZERO_TOL):
            warnings.warn(f'Phantom values outside the support radius {self.support_radius} are set to zero')
        values[outside] = 0
        self.values = values

    def __repr__(self):
        return f'<{self.__class__.__name__}> dim={self.dim}, P={self.P}, r_M={self.r_M}, r_s={self.support_radius}'

    def axis(self) -> np.ndarray:
        return self.spacing * grid_indices(self.P)

    def coordinates(self) -> List[np.ndarray]:
        return np.meshgrid(*([self.axis()] * self.dim), indexing='ij')

    def points(self) -> np.ndarray:
        """All grid points as an (P^d, d) array in row-major order."""
        return np.stack([c.reshape(-1) for c in self.coordinates()], axis=-1)

    def radius(self) -> np.ndarray:
        return np.sqrt(sum(c * c for c in self.coordinates()))

    def with_values(self, values) -> 'Phantom':
        return Phantom(values, self.r_M, self.support_radius, self.meta)


def _center(params: Dict, dim: int) -> np.ndarray:
    center = np.asarray(params.get('center', np.zeros(dim)), dtype=float).reshape(-1)
    if center.shape != (dim,):
        raise ParamException(message=f'center has to have {dim} entries')
    return center


def _gaussian_blob(params, dim, P, r_M):
    center = _center(params, dim)
    sigma = float(params.get('sigma', 0.1 * r_M))
    amplitude = float(params.get('amplitude', 1.0))
    support = float(params.get('support_radius', 0.9 * r_M))
    grid = Phantom(np.zeros((P,) * dim), r_M, support)
    dist2 = sum((c - x0) ** 2 for c, x0 in zip(grid.coordinates(), center))
    values = amplitude * np.exp(-dist2 / (2 * sigma * sigma))
    values[grid.radius() > support] = 0
    return Phantom(values, r_M, support, meta={'generator': 'gaussian-blob'})


def _disk(params, dim, P, r_M):
    center = _center(params, dim)
    radius = float(params['radius'])
    amplitude = float(params.get('amplitude', 1.0))
    support = float(params.get('support_radius', np.linalg.norm(center) + radius))
    if support >= r_M:
        raise SupportException(message=f'disk reaches {support}, outside the measurement half-width r_M = {r_M}')
    grid = Phantom(np.zeros((P,) * dim), r_M, support)
    dist2 = sum((c - x0) ** 2 for c, x0 in zip(grid.coordinates(), center))
    values = np.where(dist2 <= radius * radius, amplitude, 0.0)
    values[grid.radius() > support] = 0
    return Phantom(values, r_M, support, meta={'generator': 'disk'})


def _shepp_like(params, dim, P, r_M):
    scale = float(params.get('scale', r_M))
    shapes = params.get('shapes', SHEPP_LIKE)
    support = float(params.get('support_radius', 0.95 * r_M))
    grid = Phantom(np.zeros((P,) * dim), r_M, support)
    coords = grid.coordinates()
    values = np.zeros((P,) * dim)
    for shape in shapes:
        center = np.zeros(dim)
        center[:2] = np.asarray(shape['center'], dtype=float)[:2] * scale
        axes = np.asarray(shape['axes'], dtype=float) * scale
        # 3D grids reuse the smaller semi-axis along the remaining direction
        axes = np.concatenate([axes[:2], np.full(dim - 2, min(axes[:2]))]) if len(axes) < dim else axes[:dim]
        angle = float(shape.get('angle', 0.0))
        c, s = math.cos(angle), math.sin(angle)
        u = c * (coords[0] - center[0]) + s * (coords[1] - center[1])
        v = -s * (coords[0] - center[0]) + c * (coords[1] - center[1])
        level = (u / axes[0]) ** 2 + (v / axes[1]) ** 2
        for k in range(2, dim):
            level = level + ((coords[k] - center[k]) / axes[k]) ** 2
        values = values + np.where(level <= 1, float(shape['amplitude']), 0.0)
    values[grid.radius() > support] = 0
    return Phantom(values, r_M, support, meta={'generator': 'shepp-like'})


def _single_voxel(params, dim, P, r_M):
    index = np.asarray(params.get('index', np.zeros(dim, dtype=int)), dtype=int).reshape(-1)
    if index.shape != (dim,) or np.any(index < -P // 2) or np.any(index >= P - P // 2):
        raise ParamException(message=f'voxel index {index.tolist()} is outside the grid')
    amplitude = params.get('amplitude', 1.0)
    spacing = 2 * r_M / P
    support = float(params.get('support_radius', np.linalg.norm(index) * spacing + spacing))
    values = np.zeros((P,) * dim, dtype=complex if isinstance(amplitude, complex) else float)
    values[tuple(index + P // 2)] = amplitude
    return Phantom(values, r_M, support, meta={'generator': 'single-voxel'})


_GENERATORS = {
    'gaussian-blob': _gaussian_blob,
    'disk': _disk,
    'shepp-like': _shepp_like,
    'single-voxel': _single_voxel
}


def make_phantom(
        description: Dict,
        dim: int,
        P: int,
        r_M: float
) -> Phantom:
    """
    Generate one of the built-in phantoms.

    Parameters
    ----------
    description: Dict
        ``{"generator": <name>, ...generator parameters}``. A ``"components"``
        list sums several generator descriptions on the same grid.
    dim: int
        Spatial dimension.
    P: int
        Grid points per axis.
    r_M: float
        Grid half-width; also the distance of the measurement plane.

    Returns
    -------
    Phantom
    """
    components = description.get('components')
    if components:
        parts = [make_phantom(c, dim, P, r_M) for c in components]
        support = max(p.support_radius for p in parts)
        return Phantom(sum(p.values for p in parts), r_M, support, meta={'generator': 'composite'})
    generator = description.get('generator')
    if generator not in _GENERATORS:
        raise ConverterException(
            message=f'Do not support phantom generator "{generator}". '
                    f'Supported generators are: {__supported_generator__}'
        )
    return _GENERATORS[generator](description, dim, P, r_M)
