"""
Exception hierarchy for the SMTJ simulator.

Every error raised on purpose by the library derives from SmtjError, so the
CLI can tell configuration problems (exit 1) from runtime failures (exit 2).
"""

from typing import Any, Dict, Optional


class SmtjError(Exception):
    """Base class for all simulator errors."""


class DomainError(SmtjError, ValueError):
    """A numeric input lies outside the domain where a law is defined."""


class DataError(SmtjError, ValueError):
    """Sample data cannot support the requested analysis."""


class NoSignalError(SmtjError, ValueError):
    """Device voltage levels never cross both comparator thresholds."""


class MeasurementError(SmtjError, ValueError):
    """The timing window could not be formed (misconfigured paths)."""


class ConfigError(SmtjError, ValueError):
    """An experiment configuration is invalid or unreadable."""


class UsageError(SmtjError, ValueError):
    """An operation or command was called with unusable arguments."""


class FitError(SmtjError, RuntimeError):
    """A fit did not converge or is underdetermined."""

    def __init__(self, message: str, diagnostics: Optional[Dict[str, Any]] = None):
        super().__init__(message)
        self.diagnostics: Dict[str, Any] = diagnostics or {}

    def __str__(self) -> str:
        if not self.diagnostics:
            return super().__str__()
        details = " | ".join(f"{k}={v}" for k, v in self.diagnostics.items())
        return f"{super().__str__()} | {details}"
