"""Exception types raised across the package."""


class EngelError(Exception):
    """Base class for all package errors."""


class DomainError(EngelError, ValueError):
    """An argument lies outside the domain of an operation."""


class DegenerateTangentError(EngelError, ValueError):
    """The tangent vector or 2-vector vanishes, so the map is not an immersion."""


class DegreeRangeError(EngelError, ValueError):
    """A computed degree is impossible for a submanifold of this dimension."""


class ShapeError(EngelError, ValueError):
    """Input has the wrong structure (e.g. a surface that is not in graph form)."""


class ToleranceNotMetError(EngelError, RuntimeError):
    """A numerical procedure stopped before reaching the requested tolerance.

    The best available estimate and, when one exists, the error bracket are
    attached so callers can still inspect the partial result.
    """

    def __init__(self, message, estimate=None, bracket=None):
        super().__init__(message)
        self.estimate = estimate
        self.bracket = bracket


class ResolutionError(EngelError, ValueError):
    """A sample grid is too coarse for the requested covering scale."""


class PreconditionError(EngelError, ValueError):
    """An operation's precondition on its input submanifold does not hold."""


class CertificationError(EngelError, AssertionError):
    """An oracle check exceeded its residual threshold."""

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report
