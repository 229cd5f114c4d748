"""Exception hierarchy shared by every module."""


class VLSError(Exception):
    """Base class for all errors raised by vlsvitals."""


class ValidationError(VLSError, ValueError):
    """An input violates a documented precondition or invariant."""


class DomainError(ValidationError):
    """A numeric argument is outside the domain of the operation."""


class FieldOfViewError(DomainError):
    """The incidence angle is at or beyond the half-power semi-angle."""


class TraceFormatError(ValidationError):
    """A trace file could not be parsed."""

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class ConfigError(ValidationError):
    """A run configuration is malformed or inconsistent."""


class UnstableFilterError(VLSError, ArithmeticError):
    """Filter coefficients place a pole on or outside the unit circle."""


class TraceIOError(VLSError, OSError):
    """Reading or writing a file failed."""
