import math

import numpy as np
import pytest

from conftest import full_turn, gaussian, relative_error
from difftomo.coverage import GridSpec, IndicatrixField, coverage_mask
from difftomo.exceptions import IndicatrixException, ParamException
from difftomo.geometry import FrequencySamples, two_scan_path
from difftomo.metrics import psnr
from difftomo.recon import (
    Volume, backpropagate, backpropagate_sym, fY_oracle, inverse_ndft_reconstruct, node_weights
)
from difftomo.scattering import forward_ndft, make_phantom


def ones(y):
    return np.ones(len(y))


def twos(y):
    return np.full(len(y), 2.0)


def disk(radius):
    return lambda y: np.linalg.norm(y, axis=-1) < radius


@pytest.fixture
def simulated():
    path = full_turn(math.pi)
    phantom = gaussian(16, 4.0, 0.6, 3.0)
    return path, phantom, forward_ndft(phantom, path, 32, 32)


class TestVolume:

    def test_grid(self):
        volume = Volume(np.zeros((8, 8)), 2.0, 'bp')
        assert volume.spacing == 0.5
        assert volume.meta['method'] == 'bp'

    def test_rejects_non_finite(self):
        with pytest.raises(ParamException):
            Volume(np.full((4, 4), np.nan), 1.0, 'bp')


class TestWeights:

    def test_backward_incidence(self):
        k0, r_M = math.pi, 4.0
        path = full_turn(k0, incidence=(0.0, 1.0))
        samples = FrequencySamples(path, 16, 8)
        x = np.abs(k0 * samples.x_unit[:, 0])[None, :]
        expected = -1j / k0 * (2 * np.pi) ** -1.5 * x * np.exp(-1j * samples.kappa * r_M) * samples.quadrature()
        weights = node_weights(samples, r_M, np.full(samples.kappa.shape, 2.0))
        np.testing.assert_allclose(weights, expected, rtol=1e-10, atol=1e-15)

    def test_side_incidence(self):
        k0, r_M = math.pi, 4.0
        path = full_turn(k0)
        samples = FrequencySamples(path, 16, 8)
        expected = -2j / k0 * (2 * np.pi) ** -1.5 * samples.kappa * np.exp(-1j * samples.kappa * r_M) * samples.quadrature()
        np.testing.assert_allclose(node_weights(samples, r_M), expected, rtol=1e-10, atol=1e-15)

    def test_dropped_nodes_vanish(self):
        samples = FrequencySamples(full_turn(1.0), 8, 4)
        weights = node_weights(samples, 4.0)
        np.testing.assert_array_equal(weights[:, ~samples.valid], 0)


class TestBackpropagate:

    def test_zero_data(self, simulated):
        path, _, sino = simulated
        volume = backpropagate(sino.with_data(np.zeros_like(sino.data)), path, 16)
        np.testing.assert_array_equal(volume.values, 0)
        assert volume.method == 'bp'

    def test_linear(self, simulated, rng):
        path, _, sino = simulated
        other = sino.with_data(rng.normal(size=sino.data.shape) * sino.valid)
        combined = backpropagate(sino.with_data(sino.data + 2 * other.data), path, 16).values
        expected = backpropagate(sino, path, 16).values + 2 * backpropagate(other, path, 16).values
        np.testing.assert_allclose(combined, expected, rtol=1e-10, atol=1e-12)

    def test_sym_on_half_turn(self):
        path = full_turn(math.pi, length=math.pi)
        sino = forward_ndft(gaussian(16, 4.0, 0.6, 3.0), path, 32, 32)
        plain = backpropagate(sino, path, 16, ones)
        sym = backpropagate_sym(sino, path, 16, ones)
        assert np.isrealobj(sym.values)
        np.testing.assert_allclose(sym.values, 2 * plain.values.real, rtol=1e-12, atol=1e-14)

    def test_sym_on_full_turn(self, simulated):
        path, _, sino = simulated
        plain = backpropagate(sino, path, 16, ones)
        sym = backpropagate_sym(sino, path, 16, twos)
        np.testing.assert_allclose(sym.values, plain.values.real, rtol=1e-12, atol=1e-14)

    def test_sym_needs_sym_field(self, simulated):
        path, _, sino = simulated
        field = IndicatrixField(GridSpec.for_path(path, 32), np.ones((32, 32)))
        with pytest.raises(IndicatrixException):
            backpropagate_sym(sino, path, 16, field)

    def test_vanishing_field(self, simulated):
        path, _, sino = simulated
        field = IndicatrixField(GridSpec.for_path(path, 32), np.zeros((32, 32)))
        with pytest.raises(IndicatrixException):
            backpropagate(sino, path, 16, field)

    def test_callable_below_one(self, simulated):
        path, _, sino = simulated
        with pytest.raises(IndicatrixException):
            backpropagate(sino, path, 16, lambda y: np.zeros(len(y)))

    def test_few_zeros_are_clamped(self, simulated):
        path, _, sino = simulated
        grid = GridSpec.for_path(path, 64)
        values = (grid.points()[:, 0] > -1.5 * math.pi).reshape(grid.shape)
        with pytest.warns(UserWarning):
            volume = backpropagate(sino, path, 16, IndicatrixField(grid, values))
        assert volume.meta['clamped'] > 0

    def test_many_zeros_are_rejected(self, simulated):
        path, _, sino = simulated
        grid = GridSpec.for_path(path, 64)
        values = (grid.points()[:, 0] > 0).reshape(grid.shape)
        with pytest.raises(IndicatrixException):
            backpropagate(sino, path, 16, IndicatrixField(grid, values))

    def test_strict_limit_rejects_few_zeros(self, simulated):
        path, _, sino = simulated
        grid = GridSpec.for_path(path, 64)
        values = (grid.points()[:, 0] > -1.5 * math.pi).reshape(grid.shape)
        with pytest.raises(IndicatrixException):
            backpropagate(sino, path, 16, IndicatrixField(grid, values), zero_limit=0.0)
        with pytest.raises(IndicatrixException):
            backpropagate_sym(sino, path, 16, IndicatrixField(grid, values.astype(int), sym=True), zero_limit=0.0)

    def test_loose_limit_clamps_many_zeros(self, simulated):
        path, _, sino = simulated
        grid = GridSpec.for_path(path, 64)
        values = (grid.points()[:, 0] > 0).reshape(grid.shape)
        with pytest.warns(UserWarning):
            volume = backpropagate(sino, path, 16, IndicatrixField(grid, values), zero_limit=0.9)
        assert volume.meta['clamped'] > 0

    @pytest.mark.parametrize('zero_limit', [-0.1, 1.0])
    def test_zero_limit_range(self, simulated, zero_limit):
        path, _, sino = simulated
        with pytest.raises(ParamException):
            backpropagate(sino, path, 16, zero_limit=zero_limit)

    def test_wrong_path(self, simulated):
        _, _, sino = simulated
        with pytest.raises(ParamException):
            backpropagate(sino, full_turn(math.pi, length=math.pi), 16)

    @pytest.mark.slow
    def test_matches_oracle(self):
        k0 = math.pi
        path = full_turn(k0)
        phantom = gaussian(32, 4.0, 0.6, 3.5)
        sino = forward_ndft(phantom, path, 256, 256)
        volume = backpropagate(sino, path, 32, ones)
        oracle = fY_oracle(phantom, disk(2 * k0))
        assert relative_error(volume.values, oracle.values) <= 0.05

    @pytest.mark.slow
    def test_estimated_indicatrix_helps(self):
        path = two_scan_path(2 * math.pi)
        phantom = make_phantom({'components': [
            {'generator': 'disk', 'radius': 2.5},
            {'generator': 'disk', 'radius': 1.0, 'center': [1.5, 1.5], 'amplitude': 0.5}
        ]}, 2, 64, 7.0)
        sino = forward_ndft(phantom, path, 128, 256)
        field = coverage_mask(path, GridSpec.for_path(path, 128), N=1024)
        assert field.values.max() >= 2
        weighted = backpropagate(sino, path, 64, field)
        plain = backpropagate(sino, path, 64, ones)
        assert psnr(phantom.values, weighted.real) >= psnr(phantom.values, plain.real) + 1.0

    @pytest.mark.slow
    def test_estimated_indicatrix_on_shepp_like(self):
        path = two_scan_path(2 * math.pi)
        phantom = make_phantom({'generator': 'shepp-like'}, 2, 64, 7.0)
        sino = forward_ndft(phantom, path, 256, 512)
        field = coverage_mask(path, GridSpec.for_path(path, 128), N=2048)
        oracle = fY_oracle(phantom, field)
        weighted = backpropagate(sino, path, 64, field)
        plain = backpropagate(sino, path, 64, ones)
        weighted_error = relative_error(weighted.values, oracle.values)
        assert weighted_error <= 0.2
        assert weighted_error < relative_error(plain.values, oracle.values)


class TestOracle:

    @pytest.fixture
    def phantom(self):
        return gaussian(32, 4.0, 0.5, 3.5)

    def test_full_mask_is_identity(self, phantom):
        volume = fY_oracle(phantom, lambda y: np.ones(len(y), dtype=bool))
        np.testing.assert_allclose(volume.values, phantom.values, atol=1e-12)
        assert volume.meta['covered'] == volume.meta['total']

    def test_empty_mask(self, phantom):
        volume = fY_oracle(phantom, lambda y: np.zeros(len(y), dtype=bool))
        np.testing.assert_array_equal(volume.values, 0)

    def test_nested_masks(self, phantom):
        norms = [np.linalg.norm(fY_oracle(phantom, disk(r)).values) for r in (1.0, 2.0, 4.0, 8.0)]
        assert all(a <= b + 1e-12 for a, b in zip(norms, norms[1:]))
        assert norms[-1] <= np.linalg.norm(phantom.values) + 1e-12

    def test_orthogonal_split(self, phantom):
        projected = fY_oracle(phantom, disk(3.0)).values
        total = np.linalg.norm(phantom.values) ** 2
        split = np.linalg.norm(projected) ** 2 + np.linalg.norm(phantom.values - projected) ** 2
        assert split == pytest.approx(total, rel=1e-9)

    def test_real_part_is_closer(self, phantom):
        half = lambda y: (y[:, 0] > 0) & (np.linalg.norm(y, axis=-1) < 5.0)
        projected = fY_oracle(phantom, half).values
        assert np.linalg.norm(phantom.values - projected.real) <= np.linalg.norm(phantom.values - projected)

    def test_field_mask(self, phantom):
        grid = GridSpec(2, 64, 4 * math.pi)
        field = IndicatrixField(grid, np.ones(grid.shape))
        volume = fY_oracle(phantom, field)
        np.testing.assert_allclose(volume.values, phantom.values, atol=1e-12)


class TestInverseNDFT:

    @pytest.fixture(scope='class')
    def setup(self):
        path = full_turn(2 * math.pi)
        phantom = gaussian(16, 4.0, 0.6, 3.0)
        return path, phantom, forward_ndft(phantom, path, 64, 64)

    @pytest.mark.slow
    def test_recovers_phantom(self, setup):
        path, phantom, sino = setup
        volume = inverse_ndft_reconstruct(sino, path, 16, tol=1e-8, max_iter=300)
        assert volume.meta['converged']
        assert relative_error(volume.values, phantom.values) <= 0.01

    @pytest.mark.slow
    def test_real_constraint(self, setup):
        path, phantom, sino = setup
        volume = inverse_ndft_reconstruct(sino, path, 16, tol=1e-8, max_iter=300, real_constraint=True)
        assert np.isrealobj(volume.values)
        assert relative_error(volume.values, phantom.values) <= 0.01

    def test_history_in_meta(self, simulated):
        path, _, sino = simulated
        with pytest.warns(UserWarning):
            volume = inverse_ndft_reconstruct(sino, path, 16, tol=1e-14, max_iter=3)
        assert volume.method == 'inverse-ndft'
        assert volume.meta['iterations'] == 3
        assert len(volume.meta['residuals']) == 4
