"""
Exception hierarchy for the Clifford STFT toolkit.

Numerical guards raise one of these; diagnostics never do. The CLI error
handler maps any CliffordError to a nonzero exit status with a one-line
message, while the full context goes to the log.
"""

from typing import Any, Dict, Optional


class CliffordError(Exception):
    """Base class for all toolkit errors."""

    def __init__(self, message: str, context: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.context: Dict[str, Any] = context or {}

    def __str__(self) -> str:
        base = super().__str__()
        if not self.context:
            return base
        details = ", ".join(f"{key}={value}" for key, value in self.context.items())
        return f"{base} ({details})"


class DimensionError(CliffordError):
    """Odd, too small, or mismatched algebra dimension."""


class SpecialFunctionDomainError(CliffordError):
    """Argument outside the supported domain of a special function."""


class QuadratureGuardError(CliffordError):
    """Node budget exceeded or a non-finite integrand value was met."""


class WindowError(CliffordError):
    """Non-radial window or a window with vanishing square norm."""


class SeriesConvergenceError(CliffordError):
    """Truncated kernel series did not reach the requested tolerance."""


class SignalSpecError(CliffordError):
    """Unparseable signal selector."""
