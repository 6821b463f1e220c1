"""Exception hierarchy shared by all cramkit modules."""


class CramError(Exception):
    """Base class for every error raised by cramkit."""


class DomainError(CramError, ArithmeticError):
    """Argument outside the domain of an arithmetic operation."""


class ParseError(CramError, ValueError):
    """A decimal literal or input file could not be parsed."""


class ValidationError(CramError, ValueError):
    """A coefficient set or input object violates its invariants."""


class PoleProximityError(CramError, ArithmeticError):
    """Evaluation point too close to a pole of the rational function."""

    def __init__(self, message, index):
        super().__init__(message)
        self.index = index


class ConvergenceError(CramError, ArithmeticError):
    """An iterative method did not converge.

    ``best`` holds the last iterate and ``residuals`` the matching residual
    magnitudes so callers can inspect how far off the iteration was.
    """

    def __init__(self, message, best=None, residuals=None):
        super().__init__(message)
        self.best = best
        self.residuals = residuals


class SingularMatrixError(CramError, ArithmeticError):
    def __init__(self, message, column):
        super().__init__(message)
        self.column = column


class IllPosedError(CramError, ArithmeticError):
    """Least-squares problem is numerically rank deficient."""


class DegenerateChainError(CramError, ValueError):
    """Decay chain has repeated decay constants."""
