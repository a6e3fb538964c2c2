"""
Check records, the check registry and the shared verification context.

Every registered check is a callable taking the VerificationContext and
returning one or more CheckRecord rows. The runner calls the checks in
registration order; an exception inside a check becomes a failed record
(or an informational one for diagnostics) instead of ending the run.
"""

import csv
import json
import logging
import math
import os
import traceback
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Dict, List, Literal, Optional

import numpy as np
from pydantic import BaseModel, Field

from app.config.config_model import AppConfig
from app.core.algebra import CliffordDim
from app.core.cache_manager import get_cache
from app.core.calibration import EmpiricalConstant, kernel_bound_constant
from app.core.cstft import InequalitySettings, StftGrids, Window, default_qmc_map
from app.core.quadrature import Grid, QmcMap, QmcSampler, grid_from_model
from app.core.signals import build_signal, build_window
from app.core.transform import CliffordField

logger = logging.getLogger(__name__)

Kind = Literal['assertion', 'diagnostic']
Status = Literal['pass', 'fail', 'info']

REPORT_COLUMNS = ("check_name", "anchor", "kind", "lhs", "rhs", "error", "tolerance", "status", "detail")


class CheckRecord(BaseModel):
    """One row of the verification report."""
    check_name: str = Field(description="Unique name of the check")
    anchor: str = Field(description="The mathematical statement the check exercises")
    kind: Kind = Field(description="Assertions gate the exit status, diagnostics never do")
    lhs: Optional[float] = Field(default=None, description="Computed left side")
    rhs: Optional[float] = Field(default=None, description="Computed right side")
    error: Optional[float] = Field(default=None, description="Deviation measure compared with the tolerance")
    tolerance: Optional[float] = Field(default=None, description="Accepted deviation")
    status: Status = Field(description="pass or fail for assertions, info for diagnostics")
    detail: str = Field(default="", description="Free-form context")

    @property
    def failed(self) -> bool:
        return self.kind == 'assertion' and self.status == 'fail'


def _real(value) -> Optional[float]:
    if value is None:
        return None
    return float(np.real(value))


def compare(name: str, anchor: str, error: float, tolerance: float, lhs=None, rhs=None,
            detail: str = "") -> CheckRecord:
    """Assertion passing when error ≤ tolerance; NaN errors fail."""
    error = float(error)
    passed = math.isfinite(error) and error <= tolerance
    return CheckRecord(check_name=name, anchor=anchor, kind='assertion', lhs=_real(lhs), rhs=_real(rhs),
                       error=error, tolerance=tolerance, status='pass' if passed else 'fail', detail=detail)


def holds(name: str, anchor: str, passed: bool, lhs=None, rhs=None, detail: str = "",
          tolerance: Optional[float] = None) -> CheckRecord:
    """Assertion on an inequality or a structural property."""
    return CheckRecord(check_name=name, anchor=anchor, kind='assertion', lhs=_real(lhs), rhs=_real(rhs),
                       tolerance=tolerance, status='pass' if passed else 'fail', detail=detail)


def diagnostic(name: str, anchor: str, lhs=None, rhs=None, error=None, detail: str = "") -> CheckRecord:
    return CheckRecord(check_name=name, anchor=anchor, kind='diagnostic', lhs=_real(lhs), rhs=_real(rhs),
                       error=_real(error), status='info', detail=detail)


# ==================================================================================
# Context
# ==================================================================================

class VerificationContext:
    """
    Configuration-derived objects shared by the checks.

    Expensive pieces (grids, the kernel bound constant) are built on first
    use and reused by every later check.
    """

    def __init__(self, config: AppConfig, workers: int = 1):
        self.config = config
        self.workers = workers
        self.dim = CliffordDim(config.algebra.dim)
        self.grids = StftGrids.from_config(config)
        self.logger = logging.getLogger(__name__)

    @property
    def d(self) -> int:
        return self.dim.d

    def tol(self, name: str) -> float:
        return self.config.tolerances.get(name)

    def rng(self, offset: int = 0) -> np.random.Generator:
        return np.random.default_rng(self.config.qmc.seed + offset)

    def sampler(self, count: Optional[int] = None, offset: int = 0) -> QmcSampler:
        """Sobol sampler over R^{2d} seeded from the configuration."""
        qmc = self.config.qmc
        return QmcSampler(2 * self.d, count or qmc.count, qmc.seed + offset, qmc.replicates)

    @cached_property
    def signal(self) -> CliffordField:
        return build_signal(self.config)

    @cached_property
    def window(self) -> Window:
        return build_window(self.config)

    @cached_property
    def gaussian(self) -> CliffordField:
        return CliffordField.gaussian(self.dim)

    @cached_property
    def unit_window(self) -> Window:
        return Window.gaussian(self.dim)

    @cached_property
    def output_grid(self) -> Grid:
        return grid_from_model(self.config.grids.output, self.d)

    @cached_property
    def parseval_grid(self) -> Grid:
        return grid_from_model(self.config.grids.parseval, self.d)

    @cached_property
    def kernel_constant(self) -> EmpiricalConstant:
        return kernel_bound_constant(self.d, self.config.kernel, self.config.qmc.seed)

    @cached_property
    def inequality_settings(self) -> InequalitySettings:
        return InequalitySettings.from_config(self.config)

    @cached_property
    def qmc_map(self) -> QmcMap:
        qmc = self.config.qmc
        return default_qmc_map(self.d, qmc.sigma_x, qmc.sigma_omega)

    @cached_property
    def reconstruction_map(self) -> QmcMap:
        qmc = self.config.qmc
        return default_qmc_map(self.d, qmc.reconstruction_sigma_x, qmc.reconstruction_sigma_omega)

    def release_samples(self) -> None:
        """Drop memoized grid samples once a memory-heavy check is done."""
        get_cache().clear_cache("samples")


# ==================================================================================
# Registry and runner
# ==================================================================================

CheckFunc = Callable[[VerificationContext], List[CheckRecord]]


@dataclass(frozen=True)
class RegisteredCheck:
    """A check function with the metadata of its failure record."""
    name: str
    anchor: str
    kind: Kind
    func: CheckFunc


class CheckRegistry:
    """Ordered collection of checks; registration order is report order."""

    def __init__(self):
        self.checks: List[RegisteredCheck] = []
        self._names: Dict[str, int] = {}

    def add(self, name: str, func: CheckFunc, anchor: str, kind: Kind = 'assertion') -> None:
        if name in self._names:
            raise ValueError(f"check '{name}' is already registered")
        self._names[name] = len(self.checks)
        self.checks.append(RegisteredCheck(name, anchor, kind, func))

    def __len__(self) -> int:
        return len(self.checks)

    def names(self) -> List[str]:
        return [check.name for check in self.checks]

    def select(self, names: Optional[List[str]]) -> List[RegisteredCheck]:
        """Checks whose name starts with one of the given prefixes, all when None."""
        if not names:
            return list(self.checks)
        return [check for check in self.checks if any(check.name.startswith(n) for n in names)]


def _failure_record(check: RegisteredCheck, error: Exception) -> CheckRecord:
    error_details = {
        "check": check.name,
        "error_type": type(error).__name__,
        "error_message": str(error),
        "traceback": traceback.format_exc(),
    }
    logger.error("Check error details: %s", json.dumps(error_details, indent=2, default=str))
    return CheckRecord(
        check_name=check.name, anchor=check.anchor, kind=check.kind,
        status='fail' if check.kind == 'assertion' else 'info',
        detail=f"{type(error).__name__}: {error}",
    )


def run_checks(registry: CheckRegistry, context: VerificationContext,
               only: Optional[List[str]] = None) -> List[CheckRecord]:
    """
    Run the selected checks in registration order.

    Args:
        registry: Registered checks
        context: Shared verification context
        only: Optional name prefixes restricting the run

    Returns:
        All records in a deterministic order
    """
    records: List[CheckRecord] = []
    selected = registry.select(only)
    logger.info(f"Running {len(selected)} of {len(registry)} verification check(s) for d={context.d}")
    for check in selected:
        logger.info(f"Check {check.name} started")
        try:
            produced = check.func(context)
        except Exception as e:
            logger.error(f"Exception while running check {check.name}:", exc_info=e)
            produced = [_failure_record(check, e)]
        for record in produced:
            logger.info(f"Check {record.check_name}: {record.status} "
                        f"(error={record.error}, tolerance={record.tolerance})")
        records.extend(produced)
    failures = sum(record.failed for record in records)
    logger.info(f"Verification finished: {len(records)} record(s), {failures} failed assertion(s)")
    return records


# ==================================================================================
# Report
# ==================================================================================

def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def write_report(records: List[CheckRecord], path: str, fmt: Literal['csv', 'json-lines'] = 'csv') -> str:
    """
    Write the report with a fixed column order.

    Floats are written with their shortest round-trip representation so
    reruns with the same configuration produce identical bytes.

    Returns:
        The written path
    """
    directory = os.path.dirname(path)
    if directory:
        os.makedirs(directory, exist_ok=True)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        if fmt == 'csv':
            writer = csv.writer(handle, lineterminator='\n')
            writer.writerow(REPORT_COLUMNS)
            for record in records:
                writer.writerow([_cell(getattr(record, column)) for column in REPORT_COLUMNS])
        else:
            for record in records:
                handle.write(json.dumps({column: getattr(record, column) for column in REPORT_COLUMNS},
                                        ensure_ascii=False) + "\n")
    logger.info(f"Verification report with {len(records)} record(s) written to {path}")
    return path
