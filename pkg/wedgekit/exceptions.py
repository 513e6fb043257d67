"""Error hierarchy shared by the services.

Each class carries the exit code the command line reports for it.
"""


class WedgekitError(Exception):
    exit_code = 1


class DomainError(WedgekitError, ValueError):
    """Input outside the domain of an operation (wrong algebra, off-shell point, bad split)."""
    exit_code = 2


class ClosureError(WedgekitError):
    """A result left the span of the algebra basis."""
    exit_code = 2


class UnsupportedError(WedgekitError):
    exit_code = 2


class NumericError(WedgekitError):
    """A computation left its floating point envelope."""
    exit_code = 3


class ConditioningError(NumericError):
    pass


class AccuracyError(NumericError):
    pass


class GradingError(NumericError):
    """Eigenprojections of an Euler element fail to give an automorphism."""
    pass


class IndeterminateError(WedgekitError):
    exit_code = 3


class ConstructionError(WedgekitError):
    """A built-in fixture failed one of its own verifications."""
    exit_code = 1


class QuadratureBoxError(DomainError):
    """Test function support leaves the quadrature box; reported as a numeric envelope failure."""
    exit_code = 3


class ViolationError(WedgekitError):
    """A check ran to completion and its result contradicts the expected property."""
    exit_code = 1
