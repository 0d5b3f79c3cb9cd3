"""Exception hierarchy shared by all modules.

The CLI maps :class:`ParameterError` and :class:`ShapeError` to exit code 2
and every other :class:`PfgasError` to exit code 3.
"""


class PfgasError(Exception):
    """Base class for library errors."""


class ParameterError(PfgasError, ValueError):
    """Model or command parameters outside the supported domain."""


class DomainError(PfgasError, ValueError):
    """Argument outside the mathematical domain of a function."""


class RegionError(PfgasError, ValueError):
    """Argument outside the region where an algorithm is accurate."""


class ShapeError(PfgasError, ValueError):
    """Array of the wrong shape or size."""


class ValidationError(PfgasError, ValueError):
    """Input fails a structural check such as skew-symmetry."""


class NumericError(PfgasError, ArithmeticError):
    """Iteration failed to converge or a result is not trustworthy."""

    def __init__(self, message, **diagnostics):
        super().__init__(message)
        self.diagnostics = diagnostics


class PrecisionError(NumericError):
    """A quantity that must be positive was lost to rounding."""


class DataError(PfgasError, ValueError):
    """Empty or malformed data."""
