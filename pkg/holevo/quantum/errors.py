"""Exceptions raised by the numerical package.

Each class carries the exit code the management commands report for it.
"""


class ToolkitError(Exception):
    """Base class for every toolkit failure"""

    exit_code = 1


class SpecParseError(ToolkitError, ValueError):
    """Raised when a channel spec or codebook file cannot be parsed"""

    exit_code = 2


class ShapeMismatchError(ToolkitError, ValueError):
    """Raised when lengths or dimensions of related inputs disagree"""

    exit_code = 2


class NotHermitianError(ToolkitError, ValueError):
    """Raised when a matrix is too far from its conjugate transpose"""

    exit_code = 2


class InvalidStateError(ToolkitError, ValueError):
    """Raised for operators, vectors or distributions violating their invariants"""

    exit_code = 2


class InfeasibleInputError(ToolkitError, ValueError):
    """Raised when a budget or constraint cannot be met"""

    exit_code = 3


class DegenerateInputError(InfeasibleInputError):
    """Raised when a construction collapses (zero vectors, zero operators, wrong channel kind)"""


class NumericalError(ToolkitError, ArithmeticError):
    """Raised when the linear algebra itself fails or is fed pathological input"""

    exit_code = 3


class InvariantViolationError(ToolkitError, ArithmeticError):
    """Raised when a bound or identity re-checked at runtime does not hold"""

    exit_code = 3


class ResourceCapError(ToolkitError, MemoryError):
    """Raised when a dimension or enumeration cap would be exceeded"""

    exit_code = 4
