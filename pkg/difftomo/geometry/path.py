import bisect
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..exceptions import ParamException

FD_RELATIVE_STEP = 1e-6
ORTHO_TOL = 1e-12


class PathPiece:
    """
    One smooth piece of an experiment path on the closed interval [start, end].

    The callables take the *local* time ``t - offset``. Built-in families use
    ``offset = start`` so each piece restarts its own clock; paths assembled from
    global callables use ``offset = 0``.
    """
    __slots__ = ['start', 'end', 'offset', 'dim', 'stationary', '_funcs', '_derivs']

    def __init__(
            self,
            start: float,
            end: float,
            dim: int,
            rotation: Callable,
            incidence: Callable,
            wavenumber: Callable,
            translation: Optional[Callable] = None,
            d_rotation: Optional[Callable] = None,
            d_incidence: Optional[Callable] = None,
            d_wavenumber: Optional[Callable] = None,
            d_translation: Optional[Callable] = None,
            offset: Optional[float] = None,
            stationary: bool = False
    ):
        if not end > start:
            raise ParamException(message=f'Empty path piece [{start}, {end}]')
        self.start = float(start)
        self.end = float(end)
        self.offset = self.start if offset is None else float(offset)
        self.dim = dim
        self.stationary = stationary
        if translation is None:
            translation = _constant(np.zeros(dim))
            d_translation = _constant(np.zeros(dim))
        self._funcs = {
            'rotation': rotation,
            'incidence': incidence,
            'wavenumber': wavenumber,
            'translation': translation
        }
        self._derivs = {
            'rotation': d_rotation,
            'incidence': d_incidence,
            'wavenumber': d_wavenumber,
            'translation': d_translation
        }

    def __repr__(self):
        return f'<{self.__class__.__name__}> [{self.start}, {self.end}]'

    @property
    def length(self) -> float:
        return self.end - self.start

    def contains(self, t: float) -> bool:
        return self.start <= t <= self.end

    def value(self, name: str, t: float):
        out = self._funcs[name](t - self.offset)
        if name == 'wavenumber':
            return float(out)
        return np.asarray(out, dtype=float)

    def derivative(self, name: str, t: float, eps: float):
        """Analytic derivative when supplied, otherwise central differences kept inside the piece."""
        analytic = self._derivs[name]
        if analytic is not None:
            out = analytic(t - self.offset)
            return float(out) if name == 'wavenumber' else np.asarray(out, dtype=float)
        lo = max(self.start, t - eps)
        hi = min(self.end, t + eps)
        return (self.value(name, hi) - self.value(name, lo)) / (hi - lo)


class ExperimentPath:
    """
    A piecewise-C1 acquisition schedule over t in [0, L].

    The object pose R(t), the incidence s(t), the translation d(t) and the wave
    number k0(t) are smooth on every piece; the pieces meet at ``breakpoints``.
    A time exactly on a breakpoint belongs to the piece on its right.
    """

    def __init__(
            self,
            dim: int,
            pieces: Sequence[PathPiece],
            family: str = 'custom',
            params: Optional[Dict] = None,
            k_max: Optional[float] = None,
            validate: bool = True
    ):
        if dim not in (2, 3):
            raise ParamException(message=f'Only dimensions 2 and 3 are supported, got {dim}')
        if not pieces:
            raise ParamException(message='A path needs at least one piece')
        if abs(pieces[0].start) > 0:
            raise ParamException(message='The first piece has to start at t = 0')
        for left, right in zip(pieces[:-1], pieces[1:]):
            if abs(left.end - right.start) > 1e-12 * max(1.0, abs(left.end)):
                raise ParamException(message=f'Pieces are not contiguous at t = {left.end}')
        self.dim = dim
        self.pieces = list(pieces)
        self.family = family
        self.params = params or {}
        self.horizon = self.pieces[-1].end
        self.breakpoints = [p.start for p in self.pieces[1:]]
        self.fd_step = FD_RELATIVE_STEP * self.horizon
        self.k_max = float(k_max) if k_max is not None else self._sample_k_max()
        if validate:
            self.validate()

    def __str__(self):
        return f"<{self.__class__.__name__}> family={self.family}, L={self.horizon}, pieces={len(self.pieces)}"

    def __repr__(self):
        return self.__str__()

    @classmethod
    def from_callables(
            cls,
            dim: int,
            horizon: float,
            rotation: Callable,
            incidence: Callable,
            wavenumber: Callable,
            translation: Optional[Callable] = None,
            breakpoints: Sequence[float] = (),
            d_rotation: Optional[Callable] = None,
            d_incidence: Optional[Callable] = None,
            d_wavenumber: Optional[Callable] = None,
            d_translation: Optional[Callable] = None,
            validate: bool = True
    ) -> 'ExperimentPath':
        """
        Build a path from callables of the global time t.

        Parameters
        ----------
        dim: int
            Spatial dimension d.
        horizon: float
            The parameter length L.
        rotation, incidence, wavenumber, translation: Callable
            t -> R(t), s(t), k0(t), d(t). The translation defaults to zero.
        breakpoints: Sequence[float]
            Sorted times in (0, L) where the callables may jump.
        d_rotation, d_incidence, d_wavenumber, d_translation: Optional[Callable]
            Analytic derivatives. Missing ones fall back to central differences
            with step 1e-6 * L.

        Returns
        -------
        ExperimentPath
        """
        edges = [0.0] + sorted(float(b) for b in breakpoints) + [float(horizon)]
        for b in edges[1:-1]:
            if not 0 < b < horizon:
                raise ParamException(message=f'Breakpoint {b} is outside (0, {horizon})')
        pieces = [
            PathPiece(
                a, b, dim, rotation, incidence, wavenumber, translation,
                d_rotation, d_incidence, d_wavenumber, d_translation, offset=0.0
            )
            for a, b in zip(edges[:-1], edges[1:])
        ]
        return cls(dim, pieces, validate=validate)

    @classmethod
    def concatenate(
            cls,
            paths: Sequence['ExperimentPath'],
            params: Optional[Dict] = None
    ) -> 'ExperimentPath':
        """Run several paths one after another; each keeps its own local clock."""
        dims = {p.dim for p in paths}
        if len(dims) != 1:
            raise ParamException(message='All sub-paths need the same dimension')
        pieces = []
        shift = 0.0
        for path in paths:
            for piece in path.pieces:
                pieces.append(
                    PathPiece(
                        piece.start + shift, piece.end + shift, piece.dim,
                        piece._funcs['rotation'], piece._funcs['incidence'],
                        piece._funcs['wavenumber'], piece._funcs['translation'],
                        piece._derivs['rotation'], piece._derivs['incidence'],
                        piece._derivs['wavenumber'], piece._derivs['translation'],
                        offset=piece.offset + shift, stationary=piece.stationary
                    )
                )
            shift += path.horizon
        return cls(
            dims.pop(), pieces, family='piecewise', params=params,
            k_max=max(p.k_max for p in paths), validate=False
        )

    def piece_index(self, t: float) -> int:
        if t < 0 or t > self.horizon:
            raise ParamException(message=f't = {t} is outside [0, {self.horizon}]')
        return min(bisect.bisect_right(self.breakpoints, t), len(self.pieces) - 1)

    def piece_at(self, t: float) -> PathPiece:
        return self.pieces[self.piece_index(t)]

    def rotation(self, t: float) -> np.ndarray:
        return self.piece_at(t).value('rotation', t)

    def incidence(self, t: float) -> np.ndarray:
        return self.piece_at(t).value('incidence', t)

    def translation(self, t: float) -> np.ndarray:
        return self.piece_at(t).value('translation', t)

    def wavenumber(self, t: float) -> float:
        return self.piece_at(t).value('wavenumber', t)

    def d_rotation(self, t: float) -> np.ndarray:
        return self.piece_at(t).derivative('rotation', t, self.fd_step)

    def d_incidence(self, t: float) -> np.ndarray:
        return self.piece_at(t).derivative('incidence', t, self.fd_step)

    def d_wavenumber(self, t: float) -> float:
        return self.piece_at(t).derivative('wavenumber', t, self.fd_step)

    def state(self, t: float) -> Tuple[np.ndarray, np.ndarray, float, np.ndarray]:
        """(R, s, k0, d) at time t."""
        piece = self.piece_at(t)
        return (
            piece.value('rotation', t),
            piece.value('incidence', t),
            piece.value('wavenumber', t),
            piece.value('translation', t)
        )

    def time_grid(self, N: int) -> Tuple[np.ndarray, np.ndarray]:
        """
        Midpoint quadrature in t, generated piece by piece.

        Piece j of length l_j receives max(1, round(N * l_j / L)) nodes, so no
        node ever lands on a breakpoint.

        Returns
        -------
        Tuple[np.ndarray, np.ndarray]
            Strictly increasing times and their quadrature weights.
        """
        if N < 1:
            raise ParamException(message=f'N has to be positive, got {N}')
        times, weights = [], []
        for piece in self.pieces:
            n = max(1, int(round(N * piece.length / self.horizon)))
            step = piece.length / n
            times.append(piece.start + (np.arange(n) + 0.5) * step)
            weights.append(np.full(n, step))
        return np.concatenate(times), np.concatenate(weights)

    def sample_times(self, per_piece: int) -> List[np.ndarray]:
        """Closed uniform samples of every piece, endpoints included."""
        return [np.linspace(p.start, p.end, per_piece + 1) for p in self.pieces]

    def _sample_k_max(self) -> float:
        best = 0.0
        for piece, ts in zip(self.pieces, self.sample_times(256)):
            best = max(best, max(piece.value('wavenumber', t) for t in ts))
        return best

    def validate(
            self,
            samples: int = 16
    ):
        """
        Check SO(d) membership, unit incidence, positive wave number and
        smoothness of every piece on a few sample times.
        """
        eye = np.eye(self.dim)
        for piece, ts in zip(self.pieces, self.sample_times(samples)):
            for t in ts:
                R = piece.value('rotation', t)
                s = piece.value('incidence', t)
                k0 = piece.value('wavenumber', t)
                if R.shape != (self.dim, self.dim) or s.shape != (self.dim,):
                    raise ParamException(message=f'Path callables return wrong shapes at t = {t}')
                if np.max(np.abs(R.T @ R - eye)) > ORTHO_TOL or abs(np.linalg.det(R) - 1) > ORTHO_TOL:
                    raise ParamException(message=f'R(t) is not in SO({self.dim}) at t = {t}')
                if abs(np.linalg.norm(s) - 1) > ORTHO_TOL:
                    raise ParamException(message=f's(t) is not a unit vector at t = {t}')
                if not k0 > 0:
                    raise ParamException(message=f'k0(t) has to be positive, got {k0} at t = {t}')
            self._check_smoothness(piece, ts[1:-1])

    def _check_smoothness(self, piece: PathPiece, ts: np.ndarray):
        # difference quotients at two step sizes must agree on a smooth piece
        h = 1e-4 * piece.length
        for name in ('rotation', 'incidence', 'wavenumber', 'translation'):
            for t in ts:
                if t - 2 * h < piece.start or t + 2 * h > piece.end:
                    continue
                coarse = (piece.value(name, t + 2 * h) - piece.value(name, t - 2 * h)) / (4 * h)
                fine = (piece.value(name, t + h) - piece.value(name, t - h)) / (2 * h)
                scale = 1.0 + np.max(np.abs(coarse))
                if not np.all(np.isfinite(coarse)) or np.max(np.abs(coarse - fine)) > 1e-2 * scale:
                    raise ParamException(message=f'{name} is not smooth near t = {t}')


def _constant(value):
    value = np.array(value, dtype=float)
    return lambda t: value
