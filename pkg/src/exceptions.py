"""
Exceptions for the ε-NormCRM engine.
"""

from typing import Any, Optional


class NormCRMError(Exception):
    """Base exception for all engine errors."""
    pass


class DomainError(NormCRMError, ValueError):
    """Argument outside the mathematical domain of an operation."""

    def __init__(self, name: str, value: Any, reason: str):
        self.name = name
        self.value = value
        self.reason = reason
        super().__init__(f"{name}={value!r}: {reason}")


class RangeError(NormCRMError, OverflowError):
    """Unscaled special function overflows double precision."""
    pass


class AccuracyError(NormCRMError):
    """Quadrature or series did not reach the requested tolerance."""

    def __init__(self, what: str, estimate: float, error_bound: float):
        self.what = what
        self.estimate = estimate
        self.error_bound = error_bound
        super().__init__(
            f"{what}: tolerance not met (estimate={estimate:.17g}, bound={error_bound:.3g})"
        )


class CalibrationError(NormCRMError):
    """Calibration target cannot be bracketed over the searched κ range."""

    def __init__(self, target: float, attainable: tuple[float, float]):
        self.target = target
        self.attainable = attainable
        super().__init__(
            f"Target {target} outside attainable range "
            f"[{attainable[0]:.6g}, {attainable[1]:.6g}]"
        )


class ConfigValidationError(NormCRMError):
    """Run configuration is invalid."""

    def __init__(self, errors: list[dict]):
        self.errors = errors
        message = f"Config validation failed with {len(errors)} error(s)"
        super().__init__(message)

    def __str__(self):
        lines = ["Config validation failed:"]
        for err in self.errors:
            field = err.get("field", "unknown")
            reason = err.get("reason", "unknown error")
            lines.append(f"  - {field}: {reason}")
        return "\n".join(lines)


class DataIngestError(NormCRMError):
    """Input table could not be turned into a dataset."""

    def __init__(self, path: str, reason: str, rows: Optional[list[int]] = None):
        self.path = path
        self.reason = reason
        self.rows = rows or []
        message = f"{path}: {reason}"
        if self.rows:
            shown = ", ".join(str(r) for r in self.rows[:10])
            more = "" if len(self.rows) <= 10 else f" (+{len(self.rows) - 10} more)"
            message += f" at rows {shown}{more}"
        super().__init__(message)


class ModelConfigurationError(NormCRMError):
    """Mixture model cannot perform a requested update."""
    pass


class ChainError(NormCRMError):
    """A Gibbs sweep failed; carries the sweep index and a state snapshot."""

    def __init__(self, sweep: int, step: str, cause: Exception, snapshot: dict):
        self.sweep = sweep
        self.step = step
        self.cause = cause
        self.snapshot = snapshot
        super().__init__(f"Sweep {sweep} failed in {step}: {cause}")
