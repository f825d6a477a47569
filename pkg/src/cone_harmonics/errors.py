"""Exception hierarchy shared by every module of the package."""


class ConeHarmonicsError(Exception):
    """Base class for all errors raised by :mod:`cone_harmonics`."""


class StructuralError(ConeHarmonicsError, ValueError):
    """Malformed input: shape mismatch, non-Hermitian data, foreign algebra."""


class DomainError(ConeHarmonicsError, ValueError):
    """A point lies outside the domain of a function.

    ``index`` carries the 1-based position of the offending principal minor
    when the failure comes from a power function.
    """

    def __init__(self, message, index=None):
        super().__init__(message)
        self.index = index


class PoleError(ConeHarmonicsError, ValueError):
    """A Gamma factor was evaluated at (or within tolerance of) a pole.

    ``location`` is the nonpositive integer hit by the scalar Gamma argument,
    ``factor`` the 1-based factor index inside a product formula.
    """

    def __init__(self, message, location=None, factor=None):
        super().__init__(message)
        self.location = location
        self.factor = factor


class PreconditionError(ConeHarmonicsError, ValueError):
    """A documented precondition on parameters was violated."""


class ConvergenceError(ConeHarmonicsError, RuntimeError):
    """A quadrature or truncation did not reach its target accuracy."""
