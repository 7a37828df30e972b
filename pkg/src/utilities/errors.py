# Exception hierarchy shared by all packages. The CLI maps these onto exit codes:
# ConfigError and ConditioningError -> 2, CapabilityError -> 3, anything else -> 1.

import numpy as np


class UQError(Exception):
    """Base class for all errors raised by this package."""


class DimensionError(UQError, ValueError):
    """A vector or matrix does not have the size the operation expects."""

    def __init__(self, what, expected, actual):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what}: expected {expected}, got {actual}")


class FactorizationError(UQError, np.linalg.LinAlgError):
    """Cholesky factorization hit a non-positive pivot."""

    def __init__(self, pivot):
        self.pivot = pivot
        super().__init__(f"Matrix is not positive definite: non-positive pivot at index {pivot}")


class CapabilityError(UQError):
    """The object cannot perform the requested operation (no gradient, no direct sampler, ...)."""


class ConditioningError(UQError, KeyError):
    """Unknown, missing or unresolved named variables."""

    def __str__(self):
        return str(self.args[0]) if self.args else ""


class DomainError(UQError, ValueError):
    """A model was evaluated outside of its domain."""


class ConfigError(UQError, ValueError):
    """Invalid batch configuration. `line` is the 1-based line of the offending entry, if known."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
