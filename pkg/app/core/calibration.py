"""
Empirical constant calibration.

Bounds of the form |LHS| ≤ c · RHS come with an unspecified constant c. We
record c as the supremum of LHS/RHS on a training sample and accept the bound
when a disjoint test sample stays within `headroom` times that supremum.
"""

import logging
import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.stats import qmc

from app.config.config_model import KernelModel
from app.core.kernel import bound_ratios

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EmpiricalConstant:
    """Training and test suprema of a ratio."""
    name: str
    train_sup: float
    test_sup: float
    headroom: float
    train_count: int
    test_count: int

    @property
    def value(self) -> float:
        """The calibrated constant, the training supremum."""
        return self.train_sup

    @property
    def stability(self) -> float:
        """test_sup / train_sup; at most `headroom` for a stable constant."""
        if self.train_sup == 0:
            return 0.0 if self.test_sup == 0 else math.inf
        return self.test_sup / self.train_sup

    @property
    def passed(self) -> bool:
        return bool(np.isfinite(self.test_sup)) and self.stability <= self.headroom

    def bound(self) -> float:
        """Constant with headroom, for use on unseen points."""
        return self.headroom * self.train_sup


def sobol_box(dim: int, count: int, radius: float, seed: int) -> np.ndarray:
    """`count` scrambled Sobol points in [−radius, radius]^dim."""
    engine = qmc.Sobol(d=dim, scramble=True, seed=seed)
    unit = engine.random_base2(m=max(1, int(math.ceil(math.log2(count)))))[:count]
    return (2.0 * unit - 1.0) * radius


def calibrate(name: str, ratio: Callable[[np.ndarray], np.ndarray], train: np.ndarray, test: np.ndarray,
              headroom: float = 1.5) -> EmpiricalConstant:
    """
    Sup of `ratio` on the training rows, checked on the test rows.

    Args:
        name: Label of the constant
        ratio: Maps (M, k) parameter rows to (M,) nonnegative ratios
        train: Training rows
        test: Test rows, disjoint from train
        headroom: Allowed test/train ratio of the suprema

    Returns:
        EmpiricalConstant
    """
    train_values = np.asarray(ratio(train), dtype=float)
    test_values = np.asarray(ratio(test), dtype=float)
    constant = EmpiricalConstant(
        name=name,
        train_sup=float(np.max(train_values, initial=0.0)),
        test_sup=float(np.max(test_values, initial=0.0)),
        headroom=headroom,
        train_count=int(train_values.size),
        test_count=int(test_values.size),
    )
    logger.info(f"Calibrated {name}: train sup {constant.train_sup:.6g}, test sup {constant.test_sup:.6g} "
                f"(stability {constant.stability:.3f}, headroom {headroom})")
    return constant


def kernel_bound_constant(d: int, model: KernelModel, seed: int = 0) -> EmpiricalConstant:
    """
    Constant of |K₋(x, y)| ≤ c (1+|x|)^λ (1+|y|)^λ over the calibration box.

    Training and test pairs come from independently scrambled Sobol sequences.
    """
    def ratio(rows: np.ndarray) -> np.ndarray:
        return bound_ratios(rows[:, :d], rows[:, d:], d)

    train = sobol_box(2 * d, model.calibration_pairs, model.calibration_radius, seed)
    test = sobol_box(2 * d, model.calibration_pairs, model.calibration_radius, seed + 1)
    return calibrate(f"kernel_bound_d{d}", ratio, train, test, model.headroom)
