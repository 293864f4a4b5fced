"""Exception hierarchy.

Every error carries an ``exit_code`` used by the command-line layer:
2 for numeric failures, 3 for invalid input, 4 for structural failures of a
model map.
"""


class RenormError(Exception):
    exit_code = 2


class ValidationError(RenormError, ValueError):
    exit_code = 3


class DomainError(RenormError):
    """Argument outside the interval (or trust region) of a series."""


class ArityError(ValidationError):
    pass


class BranchError(RenormError):
    """A principal branch (power or logarithm) is not well defined."""


class DegenerateDerivativeError(RenormError):
    pass


class RangeError(RenormError):
    """Target value outside the range of a monotone map."""


class MonotonicityError(RenormError):
    pass


class DegeneracyError(RenormError):
    """Coincident points or an orbit landing on the critical point."""


class UnsupportedPeriodError(ValidationError):
    pass


class EscapeError(RenormError):
    """An orbit left the domain of the map."""


class CombinatoricsError(ValidationError):
    """Map is not renormalizable with the requested order type."""


class NoConvergenceError(RenormError):
    def __init__(self, message, residual=float("nan"), iterations=0, ell=None):
        super().__init__(message)
        self.residual = residual
        self.iterations = iterations
        self.ell = ell
        self.best = None


class WrongBranchError(RenormError):
    """Newton converged, but to a fixed point with other combinatorics."""


class NotNearParabolicError(RenormError):
    pass


class SamplingError(RenormError):
    pass


class GeometryError(RenormError):
    pass


class DataError(RenormError):
    pass


class SingularityError(RenormError):
    pass


class StructureError(RenormError):
    exit_code = 4


class NumericError(RenormError):
    pass


class DegenerateBranchError(RenormError):
    pass
