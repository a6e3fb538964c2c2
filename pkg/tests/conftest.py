"""Shared fixtures: dimensions, standard grids and Gaussian fields."""

import math

import numpy as np
import pytest

from app.config.config_model import AppConfig, CacheModel
from app.core.algebra import CliffordDim
from app.core.cache_manager import configure_cache
from app.core.quadrature import build_grid
from app.core.transform import CliffordField


@pytest.fixture(autouse=True)
def fresh_cache():
    """Every test starts from an empty memo cache."""
    configure_cache(CacheModel())
    yield


@pytest.fixture
def dim2():
    return CliffordDim(2)


@pytest.fixture
def dim4():
    return CliffordDim(4)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def transform_grid4():
    """Hermite grid matched to e^{−|x|²/2} in d = 4."""
    return build_grid(4, 'hermite', 20, scale=math.sqrt(2.0))


@pytest.fixture
def transform_grid2():
    return build_grid(2, 'hermite', 24, scale=math.sqrt(2.0))


@pytest.fixture
def stft_grid4():
    return build_grid(4, 'hermite', 16, scale=1.0)


@pytest.fixture
def output_grid4():
    return build_grid(4, 'hermite', 6, scale=1.0, max_radius=2.6)


@pytest.fixture
def gaussian4(dim4):
    return CliffordField.gaussian(dim4)


@pytest.fixture
def gaussian2(dim2):
    return CliffordField.gaussian(dim2)


@pytest.fixture
def light_config(tmp_path):
    """d = 4 configuration with small grids and sample counts for end-to-end runs."""
    return AppConfig(**{
        'grids': {
            'transform': {'scheme': 'hermite', 'nodes_per_axis': 12, 'scale': math.sqrt(2.0)},
            'output': {'scheme': 'hermite', 'nodes_per_axis': 4, 'scale': 1.0, 'max_radius': 2.0},
            'parseval': {'scheme': 'hermite', 'nodes_per_axis': 4, 'scale': 1.0, 'max_radius': 3.5},
            'stft': {'scheme': 'hermite', 'nodes_per_axis': 10, 'scale': 1.0},
            'qmc_inner': {'scheme': 'hermite', 'nodes_per_axis': 8, 'scale': 1.0},
            'nested_outer': {'scheme': 'hermite', 'nodes_per_axis': 4, 'scale': 1.0},
            'nested_inner': {'scheme': 'hermite', 'nodes_per_axis': 6, 'scale': 1.0},
            'norms': {'scheme': 'trapezoid', 'nodes_per_axis': 13, 'radius': 7.0},
        },
        'qmc': {'count': 1024, 'light_count': 1024, 'batch': 32},
        'kernel': {'calibration_pairs': 256},
        'verify': {'form_probes': 2, 'reconstruction_probes': 2, 'reproducing_probes': 2,
                   'inequality_samples': 8, 'nested': False, 'nested_probes': 1},
        'output': {'directory': str(tmp_path), 'slice': {'points': 5}, 'kernel_pairs': 16},
        'logging': {'log_file_path': str(tmp_path / 'cstft.log'), 'console_output': False},
    })
