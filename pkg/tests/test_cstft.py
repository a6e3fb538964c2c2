import math

import numpy as np
import pytest

from app.config.config_model import AppConfig, SliceModel
from app.core.algebra import CliffordDim, Multivector
from app.core.calibration import EmpiricalConstant
from app.core.cstft import (
    InequalitySettings, ReproducingKernelArgs, StftGrids, Window, asymmetric_coord, fixed_coordinates, norm_identity,
    parity_deviation, reconstruct, reproducing_kernel, spectrogram, stft_values, tensor_product, vstft, vstft_forms,
    window_norm_check,
)
from app.core.errors import DimensionError, WindowError
from app.core.quadrature import QmcSampler
from app.core.transform import CliffordField


def plane_grids() -> StftGrids:
    config = AppConfig(**{
        'algebra': {'dim': 2},
        'grids': {'stft': {'scheme': 'hermite', 'nodes_per_axis': 16, 'scale': 1.0},
                  'transform': {'scheme': 'hermite', 'nodes_per_axis': 24, 'scale': math.sqrt(2.0)},
                  'qmc_inner': {'scheme': 'hermite', 'nodes_per_axis': 12, 'scale': 1.0}},
    })
    return StftGrids.from_config(config)


@pytest.mark.parametrize("d", [2, 4])
def test_gaussian_value_at_origin(d):
    dim = CliffordDim(d)
    grid = StftGrids.from_config(AppConfig(algebra={'dim': d})).stft
    value = vstft(CliffordField.gaussian(dim), Window.gaussian(dim), np.zeros(d), np.zeros(d), grid)
    assert value.scalar_part == pytest.approx(2.0 ** (-d / 2), rel=1e-12)
    assert value.grades(tol=1e-14) == [0]


def test_window_must_be_real_scalar_and_radial(dim4, gaussian4):
    e1 = Multivector.blade(dim4, (1,))
    with pytest.raises(WindowError):
        Window(gaussian4.right_mul(e1))
    with pytest.raises(WindowError):
        Window(gaussian4 * 1j)
    shifted = CliffordField(dim4, lambda p: gaussian4(p - 0.5), name="off-centre")
    with pytest.raises(WindowError):
        Window(shifted)


def test_window_square_integral_and_spectral(dim4, stft_grid4):
    window = Window.gaussian(dim4)
    assert window.square_integral(stft_grid4) == pytest.approx(math.pi ** 2, rel=1e-12)
    assert window.spectral().field.radial
    assert window.scaled(2.0).square_integral(stft_grid4) == pytest.approx(4.0 * math.pi ** 2, rel=1e-12)
    with pytest.raises(WindowError):
        Window.gaussian(dim4).scaled(0.0).square_integral(stft_grid4)


def test_right_linearity(dim4, stft_grid4, rng):
    f = CliffordField.gaussian(dim4)
    h = CliffordField.gaussian(dim4, sigma=0.7)
    alpha = Multivector(dim4, rng.normal(size=16))
    beta = Multivector(dim4, rng.normal(size=16))
    window = Window.gaussian(dim4)
    xs = rng.uniform(-1, 1, size=(5, 4))
    omegas = rng.uniform(-1, 1, size=(5, 4))
    combined, vf, vh = stft_values([(f.right_mul(alpha) + h.right_mul(beta), window), (f, window), (h, window)],
                                   xs, omegas, stft_grid4)
    for row in range(5):
        expected = Multivector(dim4, vf[row]) * alpha + Multivector(dim4, vh[row]) * beta
        assert Multivector(dim4, combined[row]).is_close(expected, tol=1e-10)


def test_point_counts_must_match(gaussian4, stft_grid4):
    with pytest.raises(DimensionError):
        stft_values([(gaussian4, Window.gaussian(gaussian4.dim))], np.zeros((2, 4)), np.zeros((3, 4)), stft_grid4)


def test_asymmetric_coordinates(dim2):
    f = CliffordField.gaussian(dim2)
    g = CliffordField.gaussian(dim2, sigma=2.0)
    pair = asymmetric_coord(tensor_product(f, g))
    x = np.array([[0.3, -0.4]])
    t = np.array([[1.0, 0.5]])
    expected = f(t)[0, 0] * g(t - x)[0, 0]
    assert pair(x, t)[0, 0] == pytest.approx(expected)


@pytest.mark.parametrize("x, omega", [([0.0, 0.0], [0.4, -0.7]), ([0.5, 0.3], [0.0, 0.0])])
def test_forms_agree_at_degenerate_points(dim2, x, omega):
    f = CliffordField.gaussian(dim2)
    record = vstft_forms(f, Window.gaussian(dim2), x, omega, plane_grids(), nested=False)
    assert record.degenerate
    assert record.commutator.modulus() == 0.0
    assert record.deviation('imp') < 1e-10
    assert record.deviation('tensor') < 1e-10
    for form in ('f2', 'fi', 'f5'):
        assert record.deviation(form) < 1e-6


def test_generic_forms_without_nesting(dim2):
    record = vstft_forms(CliffordField.gaussian(dim2), Window.gaussian(dim2), [0.3, 0.2], [0.5, -0.1],
                         plane_grids(), nested=False)
    assert not record.degenerate
    assert record.f2 is None and record.fi is None and record.f5 is None
    assert record.deviation('f5') is None
    assert record.deviation('imp') < 1e-10


def test_parity_deviation_vanishes_on_zero_shifts(dim4, stft_grid4):
    omegas = np.array([[0.5, 0.0, 0.0, 0.0], [0.1, 0.2, 0.3, 0.4]])
    assert parity_deviation(CliffordField.gaussian(dim4), Window.gaussian(dim4), np.zeros((2, 4)), omegas,
                            stft_grid4) == 0.0


def test_spectrogram_slice_order(dim4, stft_grid4):
    slice_model = SliceModel(first_axis=1, second_axis=2, radius=1.0, points=3)
    values = spectrogram(CliffordField.gaussian(dim4), Window.gaussian(dim4), slice_model, stft_grid4)
    assert len(values) == 9
    assert values[0].x.components[0] == -1.0 and values[0].omega.components[1] == -1.0
    assert values[1].x.components[0] == -1.0 and values[1].omega.components[1] == 0.0
    assert values[4].modulus == pytest.approx(0.25, rel=1e-12)
    assert max(values, key=lambda v: v.modulus) is values[4]


def test_spectrogram_axis_guard(dim2):
    grid = plane_grids().stft
    with pytest.raises(DimensionError):
        spectrogram(CliffordField.gaussian(dim2), Window.gaussian(dim2), SliceModel(first_axis=3), grid)


def test_fixed_coordinates_pad_and_truncate():
    assert fixed_coordinates([1.0], 3).tolist() == [1.0, 0.0, 0.0]
    assert fixed_coordinates([1.0, 2.0, 3.0, 4.0, 5.0], 2).tolist() == [1.0, 2.0]


def test_reproducing_kernel_at_origin(dim4, stft_grid4):
    zero = [0.0] * 4
    value = reproducing_kernel(Window.gaussian(dim4), ReproducingKernelArgs(zero, zero, zero, zero), stft_grid4)
    assert value.scalar_part == pytest.approx((2.0 * math.pi) ** -4, rel=1e-12)
    assert value.grades(tol=1e-14) == [0]


def test_sampler_dimension_is_checked(dim2):
    with pytest.raises(DimensionError):
        norm_identity(CliffordField.gaussian(dim2), Window.gaussian(dim2), QmcSampler(dim=2, count=1024),
                      plane_grids())


@pytest.mark.slow
def test_norm_identity_in_the_plane(dim2):
    comparison = norm_identity(CliffordField.gaussian(dim2), Window.gaussian(dim2),
                               QmcSampler(dim=4, count=8192, seed=11), plane_grids())
    assert comparison.rhs.scalar_part == pytest.approx(math.pi ** 2, rel=1e-10)
    assert comparison.rel_dev < 0.02


@pytest.mark.slow
def test_reconstruction_in_the_plane(dim2):
    f = CliffordField.gaussian(dim2)
    points = np.array([[0.0, 0.0], [0.5, -0.2]])
    result = reconstruct(f, Window.gaussian(dim2), points, QmcSampler(dim=4, count=8192, seed=5), plane_grids())
    np.testing.assert_allclose(result.expected[:, 0], np.exp(-np.sum(points ** 2, axis=1) / 2.0))
    assert np.all(result.rel_errors < 0.05)


@pytest.mark.parametrize("p", [1.0, 2.0])
def test_window_norm_ratio_in_the_plane(dim2, p):
    unit_kernel = EmpiricalConstant("kernel", 1.0, 1.0, 1.5, 1, 1)
    result = window_norm_check(Window.gaussian(dim2), p, unit_kernel, plane_grids(), InequalitySettings(samples=8))
    assert result.name == f"window_norm_p{p:g}"
    assert result.kind == 'assertion'
    assert result.lhs == pytest.approx(1.0 / 1.5, rel=1e-3)
    assert result.passed
