"""Exception types shared across the package."""


class QraoError(Exception):
    """Base class for all package errors."""


class ParameterError(QraoError, ValueError):
    """An argument is outside its allowed domain."""


class DimensionError(QraoError, ValueError):
    """Operand sizes do not match (bit vectors, qubit counts, parameters)."""


class CapExceededError(QraoError):
    """A problem is larger than the configured brute-force or simulation cap."""


class EdgeListError(QraoError, ValueError):
    """Malformed edge-list input; the message carries the offending line number."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno
