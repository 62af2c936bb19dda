import logging
import string
import warnings
from concurrent.futures import ThreadPoolExecutor
from typing import List

import numpy as np
from rich.progress import track

from ._others import grid_indices
from .exceptions import ConvergenceWarning, ParamException

logger = logging.getLogger(__name__)

# upper bound on the size of one chunk's intermediate tensor
CHUNK_ELEMENTS = 1 << 22


class NodeSet:
    """
    Nonuniform nodes y_j for the kernel e^{i y_j . p}, p in {-P/2, ..., P/2-1}^d.

    Nodes are dimensionless; physical frequencies are pre-scaled by the caller.
    """

    def __init__(
            self,
            points,
            P: int
    ):
        points = np.asarray(points, dtype=float)
        if points.ndim == 1:
            points = points[:, None]
        if points.ndim != 2 or points.shape[0] < 1:
            raise ParamException(message=f'nodes must be a non-empty (J, d) array, got shape {points.shape}')
        if not np.all(np.isfinite(points)):
            raise ParamException(message='nodes must be finite')
        if P < 1:
            raise ParamException(message=f'P has to be positive, got {P}')
        self.points = points
        self.P = int(P)
        self.index = grid_indices(self.P)
        per_chunk = CHUNK_ELEMENTS // (self.P ** max(self.dim - 1, 1))
        self.chunk = max(1, min(2048, per_chunk))

    def __repr__(self):
        return f'<{self.__class__.__name__}> J={self.J}, d={self.dim}, P={self.P}'

    @property
    def J(self) -> int:
        return self.points.shape[0]

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    @property
    def shape(self):
        return (self.P,) * self.dim

    def slices(self) -> List[slice]:
        return [slice(a, min(a + self.chunk, self.J)) for a in range(0, self.J, self.chunk)]

    def factors(self, part: slice) -> List[np.ndarray]:
        """Per-axis factors e^{i y_{j,k} p_k} of shape (J_chunk, P)."""
        return [np.exp(1j * np.outer(self.points[part, k], self.index)) for k in range(self.dim)]


def _map(func, parts, threads: int):
    if threads <= 1 or len(parts) == 1:
        return [func(p) for p in parts]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(func, parts))


def ndft_forward(
        f,
        nodes: NodeSet,
        threads: int = 1
) -> np.ndarray:
    """
    (A f)_j = sum_p f_p e^{i y_j . p}.

    Parameters
    ----------
    f: array-like
        P^d coefficients, either shaped (P,)*d or flat in row-major order.
    nodes: NodeSet
    threads: int
        Worker threads; chunking does not depend on it.

    Returns
    -------
    np.ndarray
        J complex values.
    """
    f = np.asarray(f)
    if f.size != nodes.P ** nodes.dim:
        raise ParamException(message=f'coefficient size {f.size} does not match P^d = {nodes.P ** nodes.dim}')
    f = f.reshape(nodes.shape)
    def chunk(part):
        factors = nodes.factors(part)
        acc = np.einsum('ja,a...->j...', factors[0], f)
        for factor in factors[1:]:
            acc = np.einsum('jb,jb...->j...', factor, acc)
        return acc

    return np.concatenate(_map(chunk, nodes.slices(), threads))


def ndft_adjoint(
        a,
        nodes: NodeSet,
        threads: int = 1
) -> np.ndarray:
    """
    (A* a)_p = sum_j a_j e^{i y_j . p}, the literal adjoint with a positive sign.

    Returns
    -------
    np.ndarray
        Complex array of shape (P,)*d.
    """
    a = np.asarray(a).reshape(-1)
    if a.size != nodes.J:
        raise ParamException(message=f'input size {a.size} does not match J = {nodes.J}')
    letters = string.ascii_lowercase[:nodes.dim]
    subscripts = ','.join('j' + c for c in letters) + '->' + letters

    def chunk(part):
        factors = nodes.factors(part)
        factors[0] = factors[0] * a[part, None]
        return np.einsum(subscripts, *factors, optimize=True)

    out = np.zeros(nodes.shape, dtype=complex)
    # partial sums are added in chunk order whatever the thread count
    for partial in _map(chunk, nodes.slices(), threads):
        out += partial
    return out


def ndft_hermitian(
        a,
        nodes: NodeSet,
        threads: int = 1
) -> np.ndarray:
    """(A^H a)_p = sum_j a_j e^{-i y_j . p}, the adjoint of ndft_forward."""
    return np.conj(ndft_adjoint(np.conj(np.asarray(a)), nodes, threads))


class CGResult:
    __slots__ = ['x', 'converged', 'iterations', 'residuals', 'normal_residuals']

    def __init__(self, x, converged, iterations, residuals, normal_residuals):
        self.x = x
        self.converged = converged
        self.iterations = iterations
        self.residuals = residuals
        self.normal_residuals = normal_residuals

    def __repr__(self):
        return f'<{self.__class__.__name__}> converged={self.converged}, iterations={self.iterations}'


def cg_normal_solve(
        nodes: NodeSet,
        g,
        max_iter: int = 500,
        tol: float = 1e-6,
        real_constraint: bool = False,
        threads: int = 1,
        progress: bool = False
) -> CGResult:
    """
    Least squares solution of A f = g by conjugate gradients on the normal
    equations A^H A f = A^H g (CGLS).

    With ``real_constraint`` the problem is solved over real f, i.e. the
    gradient is replaced by its real part, so every iterate is real.

    Parameters
    ----------
    nodes: NodeSet
    g: array-like
        J data values.
    max_iter: int
    tol: float
        Stop once |A^H (g - A f)| / |A^H g| <= tol.
    real_constraint: bool
    threads: int
    progress: bool
        Show a rich progress bar over the iterations.

    Returns
    -------
    CGResult
        Best iterate (smallest data residual), convergence flag and the
        residual histories.
    """
    if not tol > 0:
        raise ParamException(message=f'tol has to be positive, got {tol}')
    g = np.asarray(g, dtype=complex).reshape(-1)
    if g.size != nodes.J:
        raise ParamException(message=f'data size {g.size} does not match J = {nodes.J}')
    if not np.all(np.isfinite(g)):
        raise ParamException(message='data contains non-finite values')

    def gradient(res):
        s = ndft_hermitian(res, nodes, threads)
        return s.real if real_constraint else s

    x = np.zeros(nodes.shape, dtype=float if real_constraint else complex)
    r = g.copy()
    s = gradient(r)
    gamma = float(np.vdot(s, s).real)
    norm0 = np.sqrt(gamma)
    residuals = [float(np.linalg.norm(r))]
    normal_residuals = [1.0]
    if norm0 == 0:
        return CGResult(x, True, 0, residuals, [0.0])

    best_x, best_res = x.copy(), residuals[0]
    p = s.copy()
    converged = False
    iterations = 0
    for k in track(range(max_iter), description='CG...', disable=not progress):
        q = ndft_forward(p, nodes, threads)
        qq = float(np.vdot(q, q).real)
        if qq == 0:
            break
        alpha = gamma / qq
        x = x + alpha * p
        r = r - alpha * q
        s = gradient(r)
        gamma_new = float(np.vdot(s, s).real)
        iterations = k + 1
        residuals.append(float(np.linalg.norm(r)))
        normal_residuals.append(np.sqrt(gamma_new) / norm0)
        logger.debug('CG iteration %d: |r| = %.3e, normal residual = %.3e', iterations, residuals[-1], normal_residuals[-1])
        if residuals[-1] <= best_res:
            best_x, best_res = x.copy(), residuals[-1]
        if normal_residuals[-1] <= tol:
            converged = True
            best_x = x
            break
        p = s + (gamma_new / gamma) * p
        gamma = gamma_new

    if not converged:
        warnings.warn(
            f'CG stopped after {iterations} iterations at normal residual {normal_residuals[-1]:.3e} > {tol}',
            ConvergenceWarning
        )
    return CGResult(best_x, converged, iterations, residuals, normal_residuals)
