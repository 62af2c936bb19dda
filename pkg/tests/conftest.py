import math

import numpy as np
import pytest

from difftomo.geometry import make_path
from difftomo.scattering import make_phantom


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture
def rotation_path():
    """Full turn of the object, incidence (0, 1), k0 = 1."""
    return make_path({'family': 'rotation-2d', 'dim': 2, 'k0': 1.0, 'incidence': [0.0, 1.0]})


@pytest.fixture
def rotation_path_side():
    """Full turn of the object, incidence (1, 0), k0 = 1."""
    return make_path({'family': 'rotation-2d', 'dim': 2, 'k0': 1.0, 'incidence': [1.0, 0.0]})


def full_turn(k0, incidence=(1.0, 0.0), length=2 * math.pi):
    return make_path({'family': 'rotation-2d', 'dim': 2, 'k0': k0, 'L': length, 'incidence': list(incidence)})


def gaussian(P, r_M, sigma, support, dim=2, center=None):
    description = {'generator': 'gaussian-blob', 'sigma': sigma, 'support_radius': support}
    if center is not None:
        description['center'] = list(center)
    return make_phantom(description, dim, P, r_M)


def relative_error(a, b):
    return float(np.linalg.norm(np.asarray(a) - np.asarray(b)) / np.linalg.norm(np.asarray(b)))


@pytest.fixture
def small_config():
    return {
        'dim': 2,
        'P': 16,
        'M': 32,
        'N': 32,
        'r_M': 4.0,
        'path': {'family': 'rotation-2d', 'k0': math.pi, 'incidence': [1.0, 0.0]},
        'phantom': {'generator': 'gaussian-blob', 'sigma': 0.8, 'support_radius': 3.0},
        'method': 'bp',
        'indicatrix': {'Q': 32, 'N_est': 128}
    }
