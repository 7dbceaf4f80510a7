"""Exception hierarchy shared by every module.

The CLI maps these onto exit codes: validation problems exit 1, numerical
failures exit 2.
"""


class HotSpotsError(Exception):
    """Base class for all errors raised by the package."""


class DomainError(HotSpotsError, ValueError):
    """An argument lies outside the mathematical domain of an operation."""


class RangeError(DomainError):
    """An argument lies outside the range where accuracy is guaranteed."""


class ValidationError(DomainError):
    """Malformed input data, e.g. a mask file or a degenerate geometry."""


class NumericalFailure(HotSpotsError, ArithmeticError):
    """An iterative procedure failed to converge or to bracket a root."""
