"""
app.verification package initialization and check registration.

This module is the central hub that collects every verification check
(kernel, transform, time-frequency, short-time transform and quasi-random
checks) into one ordered registry. The registration order is the order of
the records in the report.
"""

import logging

from .kernel_checks import register_kernel_checks
from .qmc_checks import register_qmc_checks
from .records import (
    CheckRecord, CheckRegistry, REPORT_COLUMNS, VerificationContext, run_checks, write_report,
)
from .stft_checks import register_stft_checks
from .timefreq_checks import register_timefreq_checks
from .transform_checks import register_transform_checks

logger = logging.getLogger(__name__)

__all__ = [
    "CheckRecord", "CheckRegistry", "REPORT_COLUMNS", "VerificationContext",
    "build_registry", "register_all_checks", "run_checks", "write_report",
]


def register_all_checks(registry: CheckRegistry) -> None:
    """
    Register all verification checks with the registry.

    This function registers, in order:
    1. Kernel identities, cross-form agreement and the growth bound
    2. Eigenvalues, Parseval, Plancherel, involution and inversion
    3. Translation, modulation, convolution and weighted norms
    4. Short-time transform values and equivalent forms
    5. Orthogonality, reconstruction, reproducing kernel and inequalities

    Args:
        registry: The CheckRegistry to fill
    """
    register_kernel_checks(registry)
    register_transform_checks(registry)
    register_timefreq_checks(registry)
    register_stft_checks(registry)
    register_qmc_checks(registry)
    logger.info(f"All {len(registry)} verification checks have been successfully registered")


def build_registry() -> CheckRegistry:
    registry = CheckRegistry()
    register_all_checks(registry)
    return registry
