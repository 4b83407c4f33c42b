"""Exception hierarchy."""

from __future__ import annotations


class SplitkitError(Exception):
    """Base class for all errors raised by splitkit."""


class DimensionError(SplitkitError, ValueError):
    pass


class UnsupportedSetError(SplitkitError, NotImplementedError):
    pass


class NotSingleValuedError(SplitkitError, TypeError):
    """Raised when ``apply`` is called on a set-valued operator."""


class ProjectionError(SplitkitError, ArithmeticError):
    """Iterative projector failed to converge."""

    def __init__(self, message, residual=float("nan")):
        super().__init__(f"{message} (residual={residual:.3e})")
        self.residual = residual


class NumericalError(SplitkitError, ArithmeticError):
    def __init__(self, message, condition=None):
        if condition is not None:
            message = f"{message} (condition estimate {condition:.3e})"
        super().__init__(message)
        self.condition = condition


class IterationError(SplitkitError, ArithmeticError):
    """Numeric failure during an iteration; ``trace`` holds what was recorded."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class NonConvergenceError(SplitkitError, RuntimeError):
    """Iteration budget exhausted (problem inconsistent or just slow)."""

    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


class ConfigError(SplitkitError, ValueError):
    """Malformed run configuration; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        if field:
            message = f"{field}: {message}"
        super().__init__(message)
        self.field = field
