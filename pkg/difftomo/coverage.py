import logging
from typing import Optional, Sequence, Tuple

import numpy as np
from rich.progress import track

from ._others import _as_points, _to_single
from .exceptions import ParamException
from .geometry.path import ExperimentPath

logger = logging.getLogger(__name__)


class GridSpec:
    """
    Cell-centred uniform frequency grid on [-extent, extent]^d with Q cells per
    axis. Node i sits at extent * (-1 + (2i + 1) / Q), so the grid is closed
    under y -> -y (reversal of every axis).
    """

    def __init__(
            self,
            dim: int,
            Q: int,
            extent: float
    ):
        if Q < 2:
            raise ParamException(message=f'Q has to be at least 2, got {Q}')
        if not extent > 0:
            raise ParamException(message=f'extent has to be positive, got {extent}')
        self.dim = dim
        self.Q = int(Q)
        self.extent = float(extent)

    def __repr__(self):
        return f'<{self.__class__.__name__}> dim={self.dim}, Q={self.Q}, extent={self.extent}'

    @classmethod
    def for_path(cls, path: ExperimentPath, Q: int = 128) -> 'GridSpec':
        return cls(path.dim, Q, 2 * path.k_max)

    @property
    def cell(self) -> float:
        return 2 * self.extent / self.Q

    @property
    def shape(self) -> Tuple[int, ...]:
        return (self.Q,) * self.dim

    def axis(self) -> np.ndarray:
        return self.extent * (-1 + (2 * np.arange(self.Q) + 1) / self.Q)

    def points(self) -> np.ndarray:
        grids = np.meshgrid(*([self.axis()] * self.dim), indexing='ij')
        return np.stack([g.reshape(-1) for g in grids], axis=-1)

    def to_dict(self):
        return {'dim': self.dim, 'Q': self.Q, 'extent': self.extent}


class IndicatrixField:
    """Integer raster of Card(T^-1(y)) (or Card(Tsym^-1(y)) when ``sym``)."""

    def __init__(
            self,
            grid: GridSpec,
            values,
            sym: bool = False
    ):
        values = np.asarray(values)
        if values.shape != grid.shape:
            raise ParamException(message=f'field shape {values.shape} does not match the grid {grid.shape}')
        if np.any(values < 0):
            raise ParamException(message='indicatrix values must be non-negative')
        self.grid = grid
        self.values = values.astype(np.int64)
        self.sym = sym

    def __repr__(self):
        return f'<{self.__class__.__name__}> {self.grid}, sym={self.sym}, max={int(self.values.max())}'

    def mask(self) -> np.ndarray:
        return self.values >= 1

    def cell_index(self, points) -> Tuple[np.ndarray, np.ndarray]:
        """Nearest cell index per point and whether the point lies inside the grid."""
        points = np.asarray(points, dtype=float).reshape(-1, self.grid.dim)
        scaled = (points + self.grid.extent) / self.grid.cell
        inside = np.all((scaled >= 0) & (scaled < self.grid.Q), axis=-1)
        index = np.clip(np.floor(scaled).astype(np.int64), 0, self.grid.Q - 1)
        return index, inside

    def lookup(self, points) -> np.ndarray:
        """Nearest-neighbour values at arbitrary frequencies; 0 outside the grid."""
        index, inside = self.cell_index(points)
        return np.where(inside, self.values[tuple(index.T)], 0)

    def neighbourhood_max(self, points) -> np.ndarray:
        """Maximum of the field over the 3^d cells around each point's cell."""
        index, inside = self.cell_index(points)
        best = np.zeros(len(index), dtype=np.int64)
        for offset in np.ndindex(*((3,) * self.grid.dim)):
            shifted = np.clip(index + np.asarray(offset) - 1, 0, self.grid.Q - 1)
            best = np.maximum(best, self.values[tuple(shifted.T)])
        return np.where(inside, best, 0)


def _hits(points: np.ndarray, R: np.ndarray, s: np.ndarray, k0: float):
    signed = np.linalg.norm(points + k0 * (R @ s), axis=-1) - k0
    visible = points @ R[:, -1] > -k0 * s[-1]
    return signed, visible


def hit_function(
        y,
        t: float,
        path: ExperimentPath
):
    """
    Signed distance of y to the sphere |y + k0 R s| = k0 and whether y lies on
    the visible (upper) half of it at time t.

    Returns
    -------
    Tuple
        (signed, visible) for a single y, or arrays for a stack of points.
    """
    points, single = _as_points(y, path.dim)
    R, s, k0, _ = path.state(t)
    signed, visible = _hits(points, R, s, k0)
    if single:
        return float(signed[0]), bool(visible[0])
    return signed, visible


def _count(
        points: np.ndarray,
        path: ExperimentPath,
        N: int,
        shell: float,
        progress: bool
) -> np.ndarray:
    total = np.zeros(len(points), dtype=np.int64)
    for piece in path.pieces:
        if piece.stationary:
            R = piece.value('rotation', piece.start)
            s = piece.value('incidence', piece.start)
            k0 = piece.value('wavenumber', piece.start)
            signed, visible = _hits(points, R, s, k0)
            total += 2 * ((np.abs(signed) <= shell) & visible)
            continue
        n = max(2, int(round(N * piece.length / path.horizon)))
        times = np.linspace(piece.start, piece.end, n + 1)
        prev = None
        for t in track(times, description='Indicatrix...', disable=not progress):
            R = piece.value('rotation', t)
            s = piece.value('incidence', t)
            k0 = piece.value('wavenumber', t)
            signed, visible = _hits(points, R, s, k0)
            cur = np.sign(signed).astype(np.int64)
            if prev is not None:
                total += visible * np.abs(prev - cur)
            prev = cur
    # A transversal crossing contributes 2. A hit on a sample time at the end of
    # a piece, or one split by the visibility edge, contributes 1 and counts once.
    return (total + 1) // 2


def indicatrix_estimate(
        y,
        path: ExperimentPath,
        N: int,
        sym: bool = False,
        shell: float = 0.0,
        progress: bool = False
):
    """
    Count how often the hemispheres T(., t) pass through y by tracking sign
    changes of the hit function over uniform times, piece by piece.

    Parameters
    ----------
    y: array-like
        One frequency (d,) or a stack (n, d).
    path: ExperimentPath
    N: int
        Time samples spread over the whole path (at least 2 per piece).
    sym: bool
        Count preimages under Tsym, i.e. add the count at -y.
    shell: float
        Stationary pieces never change sign; there a point counts once when it
        lies within ``shell`` of the visible sphere.
    progress: bool

    Returns
    -------
    int or np.ndarray
    """
    if N < 2:
        raise ParamException(message=f'N has to be at least 2, got {N}')
    points, single = _as_points(y, path.dim)
    counts = _count(points, path, N, shell, progress)
    if sym:
        counts = counts + _count(-points, path, N, shell, progress)
    return _to_single(counts, single)


def coverage_mask(
        path: ExperimentPath,
        grid: Optional[GridSpec] = None,
        sym: bool = False,
        N: int = 1024,
        progress: bool = False
) -> IndicatrixField:
    """
    Rasterize the indicatrix on a frequency grid.

    The field for ``sym`` is the plain field plus its point reflection, which
    on the cell-centred grid is exact. ``mask()`` of the result is the coverage.
    """
    grid = grid or GridSpec.for_path(path)
    if grid.dim != path.dim:
        raise ParamException(message='grid and path dimensions differ')
    if grid.extent < 2 * path.k_max * (1 - 1e-12):
        raise ParamException(message=f'grid extent {grid.extent} does not reach 2 k_max = {2 * path.k_max}')
    base = _count(grid.points(), path, N, grid.cell / 2, progress).reshape(grid.shape)
    values = base + np.flip(base) if sym else base
    logger.info('indicatrix on %s: %d covered nodes, max %d', grid, int(np.count_nonzero(values)), int(values.max()))
    return IndicatrixField(grid, values, sym=sym)


def indicatrix_analytic_disks(
        y,
        centers: Sequence,
        radius: float
):
    """Number of open disks (balls) of the given radius that contain y."""
    points, single = _as_points(y, np.asarray(centers).shape[-1])
    centers = np.asarray(centers, dtype=float)
    dist = np.linalg.norm(points[:, None, :] - centers[None, :, :], axis=-1)
    return _to_single(np.sum(dist < radius, axis=-1), single)


def indicatrix_analytic_anglerot(
        y,
        k0: float
):
    """
    Indicatrix of two half-turn angle scans with the object turned by 90 degrees
    in between: the coverage is the union of the disks B(+-k0 e_1), B(+-k0 e_2)
    and a point is hit once per disk containing it.
    """
    centers = k0 * np.array([[1.0, 0.0], [-1.0, 0.0], [0.0, 1.0], [0.0, -1.0]])
    return indicatrix_analytic_disks(y, centers, k0)


def indicatrix_analytic_dual_axis(
        y,
        k0: float
):
    """
    Indicatrix of the dual-axis turn (see dual_axis_path): the number of
    the solid horn tori (sqrt(y2^2 + y3^2) - k0)^2 + y1^2 < k0^2 and
    (sqrt(y1^2 + y3^2) - k0)^2 + y2^2 < k0^2 containing y.
    """
    points, single = _as_points(y, 3)
    y1, y2, y3 = points.T
    first = (np.sqrt(y2 ** 2 + y3 ** 2) - k0) ** 2 + y1 ** 2 < k0 ** 2
    second = (np.sqrt(y1 ** 2 + y3 ** 2) - k0) ** 2 + y2 ** 2 < k0 ** 2
    return _to_single(first.astype(np.int64) + second.astype(np.int64), single)
