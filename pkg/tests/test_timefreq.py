import math

import numpy as np
import pytest

from app.core.algebra import mv_product
from app.core.errors import DimensionError
from app.core.kernel import kernel_masks, kernel_values
from app.core.quadrature import build_grid
from app.core.timefreq import (
    NormKind, commutator_tm, convolve, convolve_spectral, modulate, norm, translate, translate_integral,
    translation_continuity, weighted_lp,
)
from app.core.transform import CliffordField, transform_values

SHIFT2 = np.array([0.5, -0.3])
POINTS2 = np.array([[0.0, 0.0], [0.4, 0.7], [-0.8, 0.2], [1.1, -0.5]])


def test_zero_shift_and_frequency_are_identities(gaussian2, transform_grid2):
    assert modulate(gaussian2, [0.0, 0.0]) is gaussian2
    assert translate(gaussian2, [0.0, 0.0], transform_grid2) is gaussian2


def test_shift_dimension_is_checked(gaussian2, transform_grid2):
    with pytest.raises(DimensionError):
        modulate(gaussian2, [1.0, 0.0, 0.0])
    with pytest.raises(DimensionError):
        translate(gaussian2, np.zeros(4), transform_grid2)


def test_modulation_puts_kernel_on_the_left(gaussian2):
    eta = np.array([0.3, 0.9])
    values = modulate(gaussian2, eta)(POINTS2)
    expected = mv_product(kernel_values(eta, POINTS2, 2), gaussian2(POINTS2), 2, a_masks=kernel_masks(2))
    np.testing.assert_allclose(values, expected, atol=1e-14)


def test_radial_translation_is_a_shift(gaussian2, transform_grid2):
    shifted = translate(gaussian2, SHIFT2, transform_grid2)
    np.testing.assert_allclose(shifted(POINTS2), gaussian2(POINTS2 - SHIFT2), atol=1e-14)


def test_integral_translation_agrees_with_shift(gaussian2, transform_grid2):
    integral = translate_integral(gaussian2, SHIFT2, transform_grid2)
    np.testing.assert_allclose(integral(POINTS2), gaussian2(POINTS2 - SHIFT2), atol=1e-6)


def test_translation_spectrum_is_modulated_spectrum(gaussian2, transform_grid2):
    shifted = translate(gaussian2, SHIFT2, transform_grid2)
    numeric = transform_values([shifted], POINTS2, transform_grid2)[0]
    np.testing.assert_allclose(numeric, shifted.spectrum(POINTS2), atol=1e-6)


def test_modulation_spectrum_is_shifted_spectrum(gaussian2, transform_grid2):
    eta = np.array([0.4, 0.3])
    modulated = modulate(gaussian2, eta)
    numeric = transform_values([modulated], POINTS2, transform_grid2)[0]
    np.testing.assert_allclose(numeric, gaussian2.spectrum(POINTS2 - eta), atol=1e-6)
    np.testing.assert_allclose(modulated.spectrum(POINTS2), gaussian2.spectrum(POINTS2 - eta), atol=1e-14)


def test_commutator(gaussian2, transform_grid2):
    zero = commutator_tm(gaussian2, [0.0, 0.0], [0.0, 1.0], transform_grid2)
    np.testing.assert_allclose(zero(POINTS2), 0.0)
    witness = commutator_tm(gaussian2, [1.0, 0.0], [0.0, 1.0], transform_grid2)
    assert np.max(np.abs(witness(POINTS2))) > 1e-3


OMEGA2 = np.array([0.5, 0.9])
INTERCHANGE_SHIFT2 = np.array([0.7, -0.4])


def test_transform_of_modulated_translate(gaussian2, transform_grid2):
    lhs = transform_values([modulate(translate(gaussian2, INTERCHANGE_SHIFT2, transform_grid2), OMEGA2)],
                           POINTS2, transform_grid2)[0]
    numeric = modulate(gaussian2.spectrum, INTERCHANGE_SHIFT2).detached()
    assert not numeric.has_spectrum
    rhs = translate_integral(numeric, OMEGA2, build_grid(2, 'hermite', 16),
                             inner_grid=build_grid(2, 'hermite', 32))(POINTS2)
    np.testing.assert_allclose(rhs, lhs, atol=1e-4)
    # the two sides differ once the order of τ and M is swapped on the right
    swapped = modulate(translate(gaussian2.spectrum, OMEGA2, transform_grid2), INTERCHANGE_SHIFT2)(POINTS2)
    assert np.max(np.abs(swapped - lhs)) > 1e-2


def test_transform_of_translated_modulate(gaussian2, transform_grid2):
    shifted = translate(modulate(gaussian2, OMEGA2), INTERCHANGE_SHIFT2, build_grid(2, 'hermite', 32))
    assert not shifted.radial
    lhs = transform_values([shifted], POINTS2, build_grid(2, 'hermite', 16))[0]
    rhs = modulate(translate(gaussian2.spectrum, OMEGA2, transform_grid2), INTERCHANGE_SHIFT2)(POINTS2)
    np.testing.assert_allclose(lhs, rhs, atol=1e-4)


def test_radial_convolution_matches_product_theorem(gaussian2, transform_grid2):
    direct = convolve(gaussian2, gaussian2, transform_grid2)
    np.testing.assert_allclose(direct(POINTS2), convolve_spectral(gaussian2, gaussian2, transform_grid2)(POINTS2),
                               atol=1e-6)
    # (2π)^{-1} ∫ e^{-|x-y|²/2} e^{-|y|²/2} dy = e^{-|x|²/4} / 2
    expected = 0.5 * np.exp(-np.sum(POINTS2 ** 2, axis=1) / 4.0)
    np.testing.assert_allclose(direct(POINTS2)[:, 0], expected, atol=1e-8)
    np.testing.assert_allclose(direct.spectrum(POINTS2), gaussian2.spectrum(POINTS2) ** 2, atol=1e-14)


def test_translation_continuity_decreases(gaussian2, transform_grid2):
    sizes = translation_continuity(gaussian2, transform_grid2, steps=5)
    assert len(sizes) == 5
    assert all(later < earlier for earlier, later in zip(sizes, sizes[1:]))
    assert sizes[-1] < 0.2


def test_norm_kinds():
    assert NormKind.b().p == 1.0
    assert NormKind('B', 3.0).p == 1.0
    assert NormKind.w(2.0).weight_exponent(1.0) == 2.0
    assert NormKind.bp(2.0).weight_exponent(1.0) == 1.0
    assert NormKind.lp().weight_exponent(3.0) == 0.0
    assert NormKind.w(3.0).label == "W_3,lam"
    with pytest.raises(ValueError):
        NormKind.lp(0.5)


def test_gaussian_norms(gaussian4):
    grid = build_grid(4, 'trapezoid', nodes_per_axis=25, radius=8.0)
    assert norm(gaussian4, NormKind.lp(2.0), grid) == pytest.approx(math.pi, rel=1e-8)
    assert norm(gaussian4, NormKind.lp(1.0), grid) == pytest.approx((2.0 * math.pi) ** 2, rel=1e-8)
    assert norm(gaussian4, NormKind.b(), grid) > norm(gaussian4, NormKind.lp(1.0), grid)
    assert norm(gaussian4, NormKind.w(1.0), grid) == pytest.approx(norm(gaussian4, NormKind.b(), grid))


def test_weighted_lp_of_constant_on_trapezoid():
    grid = build_grid(2, 'trapezoid', nodes_per_axis=5, radius=1.0)
    values = np.zeros((grid.size, 4))
    values[:, 0] = 1.0
    assert weighted_lp(values, grid) == pytest.approx(2.0)
    assert weighted_lp(values, grid, p=1.0) == pytest.approx(4.0)


def test_non_radial_translation_warns_without_spectrum(dim2, transform_grid2, caplog):
    field = CliffordField(dim2, lambda p: np.stack([np.exp(-np.sum(p ** 2, axis=-1) / 2.0) * p[..., 0]]
                                                   + [np.zeros(p.shape[:-1])] * 3, axis=-1), name="x1g")
    with caplog.at_level("WARNING", logger="app.core.timefreq"):
        translate(field, SHIFT2, transform_grid2)
    assert "without a known spectrum" in caplog.text
