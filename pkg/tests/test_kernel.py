import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from app.core.algebra import CliffordDim, Vector1, conjugation_signs
from app.core.errors import DimensionError, SeriesConvergenceError
from app.core.kernel import (
    KernelArgs, additivity_defect, assemble, bound_ratio, expand_kernel, kernel_masks, kernel_minus_closed,
    kernel_minus_series, kernel_plus, kernel_terms_series, kernel_values, orthogonal_ray_sweep,
)
from app.verification.kernel_checks import random_ball

coordinate = st.floats(min_value=-2.5, max_value=2.5, allow_nan=False, allow_infinity=False)


def vectors(d):
    return st.lists(coordinate, min_size=d, max_size=d).map(Vector1.of)


def test_compact_columns():
    assert kernel_masks(2) == (0, 0b11)
    assert len(kernel_masks(4)) == 7
    assert len(kernel_masks(6)) == 16


def test_plane_kernel_is_exponential_of_wedge(rng):
    x = rng.uniform(-3, 3, size=(50, 2))
    y = rng.uniform(-3, 3, size=(50, 2))
    wedge = x[:, 0] * y[:, 1] - x[:, 1] * y[:, 0]
    values = kernel_values(x, y, 2)
    np.testing.assert_allclose(values[:, 0], np.cos(wedge), atol=1e-12)
    np.testing.assert_allclose(values[:, 1], np.sin(wedge), atol=1e-12)


@pytest.mark.parametrize("d", [2, 4, 6])
def test_kernel_at_origin_is_one(d, rng):
    y = rng.normal(size=(10, d))
    values = kernel_values(np.zeros((10, d)), y, d)
    np.testing.assert_allclose(values[:, 0], 1.0, atol=1e-12)
    np.testing.assert_allclose(values[:, 1:], 0.0, atol=1e-12)


@pytest.mark.parametrize("d", [2, 4, 6])
def test_symmetry_and_reflection(d, rng):
    x = random_ball(rng, 200, d, 3.0)
    y = random_ball(rng, 200, d, 3.0)
    signs = conjugation_signs(d)[list(kernel_masks(d))]
    forward = kernel_values(x, y, d)
    np.testing.assert_allclose(kernel_values(y, x, d), forward * signs, atol=1e-12)
    np.testing.assert_allclose(kernel_values(-x, y, d), kernel_values(x, -y, d), atol=1e-12)


def test_plus_sign_negates_second_argument(rng):
    x = random_ball(rng, 40, 4, 3.0)
    y = random_ball(rng, 40, 4, 3.0)
    np.testing.assert_allclose(kernel_values(x, y, 4, sign='+'), kernel_values(x, -y, 4), atol=1e-14)
    np.testing.assert_allclose(kernel_values(x, y, 4, inverse=True), kernel_values(x, y, 4), atol=0)


def test_unknown_sign_rejected():
    with pytest.raises(ValueError):
        kernel_values(np.zeros(4), np.ones(4), 4, sign='*')


@pytest.mark.parametrize("d", [4, 6])
def test_series_agrees_with_closed_form(d, rng):
    x = random_ball(rng, 100, d, 3.0)
    y = random_ball(rng, 100, d, 3.0)
    args = KernelArgs.from_arrays(x, y)
    terms = kernel_terms_series(args, CliffordDim(d), tol=1e-13, max_terms=200)
    assert terms.report.converged
    np.testing.assert_allclose(assemble(terms, args), kernel_values(x, y, d), atol=1e-8)


def test_series_refuses_plane():
    args = KernelArgs.from_arrays(np.ones(2), np.ones(2))
    with pytest.raises(DimensionError):
        kernel_terms_series(args, CliffordDim(2))


def test_strict_series_raises_when_truncated():
    dim = CliffordDim(4)
    x = Vector1.of([2.0, 1.0, 0.0, 0.0])
    y = Vector1.of([0.0, 2.5, 1.0, 0.0])
    with pytest.raises(SeriesConvergenceError):
        kernel_minus_series(x, y, dim, tol=1e-14, max_terms=3, strict=True)


@settings(max_examples=30, deadline=None)
@given(vectors(4), vectors(4))
def test_element_level_paths_agree(x, y):
    dim = CliffordDim(4)
    closed = kernel_minus_closed(x, y, dim)
    series = kernel_minus_series(x, y, dim)
    assert closed.is_close(series, tol=1e-8)
    assert set(closed.grades(tol=1e-12)) <= {0, 2}


def test_kernel_plus_matches_reflected_minus():
    dim = CliffordDim(4)
    x = Vector1.of([0.3, -1.2, 0.7, 2.0])
    y = Vector1.of([1.1, 0.4, -0.5, 0.2])
    assert kernel_plus(x, y, dim).is_close(kernel_minus_closed(-x, y, dim), tol=1e-12)


def test_additivity_in_plane_only(rng):
    plane = CliffordDim(2)
    x, y, z = Vector1.of([0.4, -1.0]), Vector1.of([1.3, 0.2]), Vector1.of([-0.7, 1.5])
    assert additivity_defect(x, y, z, plane) < 1e-12
    space = CliffordDim(4)
    triples = [tuple(Vector1.of(v) for v in random_ball(rng, 3, 4, 2.0)) for _ in range(30)]
    assert max(additivity_defect(a, b, c, space) for a, b, c in triples) > 0.1


def test_expand_places_bivectors():
    full = expand_kernel(np.array([1.0, 2.0]), 2)
    assert full.tolist() == [1.0, 0.0, 0.0, 2.0]


def test_bound_ratio_at_origin_and_ray_sweep():
    dim = CliffordDim(4)
    assert bound_ratio(Vector1.of([0, 0, 0, 0]), Vector1.of([1, 0, 0, 0]), dim) == pytest.approx(0.5)
    sweep = orthogonal_ray_sweep(dim, max_radius=4.0, points=5)
    assert [r for r, _ in sweep] == [0.0, 1.0, 2.0, 3.0, 4.0]
    assert sweep[0][1] == pytest.approx(1.0)
    assert all(ratio > 0 for _, ratio in sweep)
