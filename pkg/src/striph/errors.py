"""Exception and warning classes shared across striph."""


class StriphError(Exception):
    """Base class for all striph errors."""


class NumericalFailure(StriphError):
    """A computation could not produce a finite, trustworthy number."""


class NonFinite(NumericalFailure):
    pass


class NotIntegrable(NumericalFailure):
    pass


class ProbeFailed(NumericalFailure):
    pass


class BadDimension(StriphError, ValueError):
    pass


class MissingDerivative(StriphError, ValueError):
    pass


class InvalidIndex(StriphError, ValueError):
    pass


class EmptyCorpus(StriphError, ValueError):
    pass


class NonzeroH(StriphError, ValueError):
    pass


class BadBoundary(StriphError, ValueError):
    pass


class Inconclusive(StriphError):
    pass


class MalformedCSV(StriphError, ValueError):
    pass


class NonMonotoneAbscissae(StriphError, ValueError):
    pass


class ConfigError(StriphError, ValueError):
    pass


class ToleranceNotReached(UserWarning):
    """Emitted when adaptive quadrature hits its depth or panel cap.

    The best available estimate is still returned; ``QuadResult.converged``
    carries the same information for callers that want it programmatically.
    """
