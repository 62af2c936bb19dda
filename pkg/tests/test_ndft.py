import math

import numpy as np
import pytest

from difftomo.exceptions import ConvergenceWarning, ParamException
from difftomo.ndft import NodeSet, cg_normal_solve, ndft_adjoint, ndft_forward, ndft_hermitian


def dense_matrix(nodes: NodeSet) -> np.ndarray:
    grids = np.meshgrid(*([nodes.index] * nodes.dim), indexing='ij')
    p = np.stack([g.ravel() for g in grids], axis=-1)
    return np.exp(1j * nodes.points @ p.T)


def random_complex(rng, shape):
    return rng.normal(size=shape) + 1j * rng.normal(size=shape)


class TestNodeSet:

    def test_one_dimensional_points(self):
        nodes = NodeSet([0.1, 0.2, 0.3], 4)
        assert nodes.dim == 1
        assert nodes.J == 3
        assert nodes.shape == (4,)

    @pytest.mark.parametrize('points', [np.zeros((0, 2)), [[np.nan, 0.0]], [[np.inf, 1.0]]])
    def test_rejects(self, points):
        with pytest.raises(ParamException):
            NodeSet(points, 8)

    def test_rejects_empty_grid(self):
        with pytest.raises(ParamException):
            NodeSet([[0.0, 0.0]], 0)


class TestOperators:

    def test_against_dense_matrix(self, rng):
        nodes = NodeSet(rng.uniform(-math.pi, math.pi, size=(37, 2)), 6)
        A = dense_matrix(nodes)
        f = random_complex(rng, (6, 6))
        a = random_complex(rng, 37)
        np.testing.assert_allclose(ndft_forward(f, nodes), A @ f.ravel(), rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(ndft_adjoint(a, nodes).ravel(), A.T @ a, rtol=1e-12, atol=1e-12)
        np.testing.assert_allclose(ndft_hermitian(a, nodes).ravel(), A.conj().T @ a, rtol=1e-12, atol=1e-12)

    def test_adjointness(self, rng):
        nodes = NodeSet(rng.uniform(-math.pi, math.pi, size=(500, 2)), 16)
        f = random_complex(rng, (16, 16))
        a = random_complex(rng, 500)
        lhs = np.vdot(a, ndft_forward(f, nodes))
        rhs = np.vdot(ndft_hermitian(a, nodes), f)
        assert abs(lhs - rhs) <= 1e-10 * np.linalg.norm(f) * np.linalg.norm(a)

    def test_fft_on_equispaced_nodes(self, rng):
        P = 64
        f = random_complex(rng, P)
        nodes = NodeSet(2 * math.pi * np.arange(P) / P, P)
        expected = P * np.fft.ifft(np.fft.ifftshift(f))
        np.testing.assert_allclose(ndft_forward(f, nodes), expected, rtol=0, atol=1e-11)

    def test_zero_node_sums(self, rng):
        f = random_complex(rng, (8, 8))
        nodes = NodeSet([[0.0, 0.0]], 8)
        assert ndft_forward(f, nodes)[0] == pytest.approx(f.sum(), rel=1e-12)

    def test_centre_indicator(self, rng):
        f = np.zeros((8, 8))
        f[4, 4] = 1.0
        nodes = NodeSet(rng.uniform(-5, 5, size=(50, 2)), 8)
        np.testing.assert_allclose(ndft_forward(f, nodes), 1.0)

    def test_flat_input(self, rng):
        nodes = NodeSet(rng.uniform(-math.pi, math.pi, size=(20, 2)), 4)
        f = random_complex(rng, (4, 4))
        np.testing.assert_array_equal(ndft_forward(f.ravel(), nodes), ndft_forward(f, nodes))

    def test_size_mismatch(self):
        nodes = NodeSet(np.zeros((3, 2)), 4)
        with pytest.raises(ParamException):
            ndft_forward(np.zeros(15), nodes)
        with pytest.raises(ParamException):
            ndft_adjoint(np.zeros(4), nodes)

    def test_threads_do_not_change_the_result(self, rng):
        nodes = NodeSet(rng.uniform(-math.pi, math.pi, size=(5000, 2)), 8)
        f = random_complex(rng, (8, 8))
        a = random_complex(rng, 5000)
        np.testing.assert_array_equal(ndft_forward(f, nodes, threads=1), ndft_forward(f, nodes, threads=4))
        np.testing.assert_array_equal(ndft_adjoint(a, nodes, threads=1), ndft_adjoint(a, nodes, threads=4))


class TestCG:

    @pytest.fixture
    def problem(self, rng):
        nodes = NodeSet(rng.uniform(-math.pi, math.pi, size=(400, 2)), 8)
        f = random_complex(rng, (8, 8))
        return nodes, f, ndft_forward(f, nodes)

    def test_recovers_coefficients(self, problem):
        nodes, f, g = problem
        result = cg_normal_solve(nodes, g, max_iter=200, tol=1e-10)
        assert result.converged
        assert np.linalg.norm(result.x - f) <= 1e-6 * np.linalg.norm(f)
        assert result.normal_residuals[-1] <= 1e-10

    def test_residuals_do_not_increase(self, problem):
        nodes, _, g = problem
        result = cg_normal_solve(nodes, g, max_iter=200, tol=1e-10)
        residuals = np.asarray(result.residuals)
        assert len(residuals) == result.iterations + 1
        assert np.all(np.diff(residuals) <= 1e-12 * residuals[0])

    def test_zero_data(self, problem):
        nodes, _, g = problem
        result = cg_normal_solve(nodes, np.zeros_like(g))
        assert result.converged
        assert result.iterations == 0
        np.testing.assert_array_equal(result.x, 0)

    def test_real_constraint(self, rng, problem):
        nodes, _, _ = problem
        f = rng.normal(size=(8, 8))
        result = cg_normal_solve(nodes, ndft_forward(f, nodes), max_iter=200, tol=1e-10, real_constraint=True)
        assert np.isrealobj(result.x)
        np.testing.assert_allclose(result.x, f, atol=1e-6)

    def test_not_converged_warns(self, problem):
        nodes, _, g = problem
        with pytest.warns(ConvergenceWarning):
            result = cg_normal_solve(nodes, g, max_iter=1, tol=1e-10)
        assert not result.converged
        assert result.iterations == 1

    def test_non_finite_data(self, problem):
        nodes, _, g = problem
        g = g.copy()
        g[3] = np.nan
        with pytest.raises(ParamException):
            cg_normal_solve(nodes, g)

    @pytest.mark.parametrize('tol', [0.0, -1e-3])
    def test_bad_tolerance(self, problem, tol):
        nodes, _, g = problem
        with pytest.raises(ParamException):
            cg_normal_solve(nodes, g, tol=tol)
