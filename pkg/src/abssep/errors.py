"""Exception hierarchy shared by every module."""


class AbsSepError(Exception):
    """Base class for all errors raised by abssep."""


class DimensionMismatch(AbsSepError, ValueError):
    pass


class NegativeEigenvalue(AbsSepError, ValueError):
    pass


class SumMismatch(AbsSepError, ValueError):
    pass


class NotNormalized(AbsSepError, ValueError):
    pass


class IndexOutOfRange(AbsSepError, IndexError):
    pass


class WrongDims(AbsSepError, ValueError):
    pass


class NotSymmetric(AbsSepError, ValueError):
    pass


class NotHermitian(AbsSepError, ValueError):
    pass


class NotSorted(AbsSepError, ValueError):
    pass


class NotBoundary(AbsSepError, ValueError):
    pass


class RankAnomaly(AbsSepError, ArithmeticError):
    """A singular L-matrix at a boundary point has rank <= 1."""


class BoundaryDisagreement(AbsSepError, ArithmeticError):
    """The determinant test and the shrink test disagree on boundary status."""


class NotMajorized(AbsSepError, ValueError):
    pass


class UnknownName(AbsSepError, KeyError):
    pass


class NoConvergence(AbsSepError, RuntimeError):
    def __init__(self, message, bracket=None):
        super().__init__(message)
        self.bracket = bracket


class DegeneracyWarning(UserWarning):
    """Two eigenvalues sit just outside the equality threshold."""
