import numpy as np
import pytest

from app.config.config_model import KernelModel
from app.core.calibration import EmpiricalConstant, calibrate, kernel_bound_constant, sobol_box


def test_sobol_box_shape_bounds_and_seed():
    points = sobol_box(3, 300, radius=2.0, seed=4)
    assert points.shape == (300, 3)
    assert np.all(np.abs(points) <= 2.0)
    np.testing.assert_array_equal(points, sobol_box(3, 300, radius=2.0, seed=4))
    assert not np.array_equal(points, sobol_box(3, 300, radius=2.0, seed=5))


def test_calibrate_records_suprema():
    train = np.linspace(0.0, 1.0, 11)[:, None]
    test = np.linspace(0.05, 0.95, 10)[:, None]
    constant = calibrate("linear", lambda rows: 2.0 * rows[:, 0], train, test, headroom=1.5)
    assert constant.value == pytest.approx(2.0)
    assert constant.test_sup == pytest.approx(1.9)
    assert constant.train_count == 11 and constant.test_count == 10
    assert constant.passed
    assert constant.bound() == pytest.approx(3.0)


def test_unstable_constant_fails():
    constant = EmpiricalConstant("grows", train_sup=1.0, test_sup=4.0, headroom=1.5, train_count=1, test_count=1)
    assert constant.stability == pytest.approx(4.0)
    assert not constant.passed


@pytest.mark.parametrize("test_sup, stability", [(0.0, 0.0), (1.0, float("inf"))])
def test_stability_with_vanishing_training_sup(test_sup, stability):
    constant = EmpiricalConstant("flat", train_sup=0.0, test_sup=test_sup, headroom=1.5, train_count=1,
                                 test_count=1)
    assert constant.stability == stability


def test_non_finite_test_sup_fails():
    constant = EmpiricalConstant("nan", train_sup=1.0, test_sup=float("nan"), headroom=1.5, train_count=1,
                                 test_count=1)
    assert not constant.passed


def test_plane_kernel_constant_is_one():
    constant = kernel_bound_constant(2, KernelModel(calibration_pairs=256, calibration_radius=3.0), seed=2)
    assert constant.name == "kernel_bound_d2"
    assert constant.value == pytest.approx(1.0, abs=1e-12)
    assert constant.test_sup == pytest.approx(1.0, abs=1e-12)
    assert constant.passed


def test_space_kernel_constant_is_stable():
    constant = kernel_bound_constant(4, KernelModel(calibration_pairs=512, calibration_radius=4.0), seed=0)
    assert 0.0 < constant.value < 10.0
    assert constant.passed
