import math

import numpy as np
import pytest

from app.config.config_model import GridModel
from app.core.errors import QuadratureGuardError
from app.core.quadrature import (
    QmcMap, QmcSampler, build_grid, grid_from_model, integrate, integrate_values, qmc_integrate,
)


def test_hermite_grid_integrates_gaussians_exactly():
    grid = build_grid(2, 'hermite', nodes_per_axis=8, scale=1.0)
    values = np.exp(-np.sum(grid.points ** 2, axis=1))
    assert float(integrate_values(values, grid)) == pytest.approx(math.pi, rel=1e-13)


def test_hermite_scale_widens_the_rule():
    grid = build_grid(1, 'hermite', nodes_per_axis=20, scale=math.sqrt(2.0))
    values = np.exp(-grid.points[:, 0] ** 2 / 2.0)
    assert float(integrate_values(values, grid)) == pytest.approx(math.sqrt(2.0 * math.pi), rel=1e-12)


def test_trapezoid_grid_weights_sum_to_volume():
    grid = build_grid(2, 'trapezoid', nodes_per_axis=11, radius=2.0)
    assert grid.size == 121
    assert float(np.sum(grid.weights)) == pytest.approx(16.0)
    assert "trapezoid n=11 R=2" in grid.describe()


def test_pruned_grid_stays_in_ball():
    grid = build_grid(3, 'hermite', nodes_per_axis=6, max_radius=2.0)
    assert grid.size < 216
    assert np.all(np.linalg.norm(grid.points, axis=1) <= 2.0)
    assert "|x|<=2" in grid.describe()


def test_grid_is_read_only_and_cached():
    first = build_grid(2, 'hermite', nodes_per_axis=5)
    second = build_grid(2, 'hermite', nodes_per_axis=5)
    assert first.points is second.points
    with pytest.raises(ValueError):
        first.points[0, 0] = 1.0


def test_node_budget_guard():
    with pytest.raises(QuadratureGuardError) as info:
        build_grid(8, 'hermite', nodes_per_axis=8)
    assert info.value.context["nodes"] == 8 ** 8


@pytest.mark.parametrize("kwargs", [{"nodes_per_axis": 1}, {"scheme": "trapezoid", "radius": 0.0},
                                    {"scheme": "simpson"}])
def test_invalid_grid_parameters(kwargs):
    with pytest.raises(ValueError):
        build_grid(2, **kwargs)


def test_grid_from_model():
    grid = grid_from_model(GridModel(scheme='trapezoid', nodes_per_axis=5, radius=1.0), 2)
    assert grid.size == 25 and grid.radius == 1.0


def test_non_finite_values_report_location():
    grid = build_grid(1, 'trapezoid', nodes_per_axis=3, radius=1.0)
    with pytest.raises(QuadratureGuardError) as info:
        integrate_values(np.array([1.0, np.inf, 0.0]), grid)
    assert info.value.context["node"] == [0.0]


def test_integrate_field(gaussian2, transform_grid2):
    total = integrate(gaussian2, transform_grid2)
    # exp(-|x|^2/2) over the plane
    assert total.scalar_part == pytest.approx(2.0 * math.pi, rel=1e-10)
    assert total.grades(tol=1e-12) == [0]


def test_sampler_rounds_to_power_of_two():
    sampler = QmcSampler(dim=3, count=3000, seed=1)
    assert sampler.effective_count == 4096
    assert sampler.unit_samples().shape == (4096, 3)


@pytest.mark.parametrize("kwargs", [{"count": 999}, {"count": 1024, "replicates": 1}])
def test_sampler_guards(kwargs):
    with pytest.raises(ValueError):
        QmcSampler(dim=2, **kwargs)


def test_qmc_is_reproducible_and_accurate():
    sampler = QmcSampler(dim=4, count=4096, seed=7)
    qmap = QmcMap(kind='gaussian', sigma=1.0)

    def integrand(points):
        return np.exp(-np.sum(points ** 2, axis=1))

    first = qmc_integrate(integrand, sampler, qmap, batch=128)
    second = qmc_integrate(integrand, sampler, qmap, batch=128, workers=3)
    assert first.value == second.value
    assert first.count == 4096
    assert float(first.value) == pytest.approx(math.pi ** 2, rel=0.01)
    assert first.error < 0.05


def test_box_map_density():
    points, inverse_density = QmcMap(kind='box', radius=2.0).apply(np.full((4, 2), 0.75))
    np.testing.assert_allclose(points, 1.0)
    np.testing.assert_allclose(inverse_density, 16.0)


def test_qmc_vector_values_keep_shape():
    sampler = QmcSampler(dim=2, count=1024, seed=3)
    result = qmc_integrate(lambda p: np.stack([np.ones(len(p)), p[:, 0] ** 2], axis=1), sampler,
                           QmcMap(kind='box', radius=1.0))
    assert result.value.shape == (2,)
    assert result.value[0] == pytest.approx(4.0)
    assert result.value[1] == pytest.approx(4.0 / 3.0, rel=1e-3)
    assert result.modulus > 4.0
