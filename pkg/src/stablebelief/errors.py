"""Exception hierarchy shared by all modules."""


class StableBeliefError(Exception):
    """Base class for all package errors."""


class InvalidParameterError(StableBeliefError, ValueError):
    """A parameter lies outside its admissible domain."""


class InsufficientDataError(StableBeliefError, ValueError):
    """Too few samples for the requested estimator or test."""


class DegenerateDataError(StableBeliefError, ValueError):
    """Data without spread (zero interquartile range, constant values)."""


class NumericalFailureError(StableBeliefError, ArithmeticError):
    """A quadrature or root search did not reach its tolerance."""


class SingularCovarianceError(StableBeliefError, ValueError):
    """Sample covariance is not positive definite."""


class DegenerateComponentError(StableBeliefError, ValueError):
    """A mixture component collapsed (weight below 1/N)."""


class InvalidCommonalityError(StableBeliefError, ValueError):
    """Moebius inversion produced clearly negative masses."""


class FrameMismatchError(StableBeliefError, ValueError):
    """Mass functions defined on different frames were combined."""


class TotalConflictError(StableBeliefError, ValueError):
    """All mass sits on the empty set, no decision is possible."""


class ResolutionMismatchError(StableBeliefError, ValueError):
    """Grid resolution and window cannot meet the inversion accuracy."""


class KMismatchError(StableBeliefError, ValueError):
    """Spectral-weight least squares is ill posed for the requested K."""


class FlatDensityError(StableBeliefError, ValueError):
    """A gridded density has fewer than two distinct values."""


class NonFiniteCdfError(StableBeliefError, ValueError):
    """A model cdf returned values outside [0, 1]."""


class GateFailure(StableBeliefError):
    """The K-S validation gate rejected at least one fitted model.

    Attributes
    ----------
    reports : list
        The full list of gate reports; failing entries have ``passAt5pct`` false.
    """

    def __init__(self, message, reports=None):
        super().__init__(message)
        self.reports = list(reports or [])


class ConfigError(StableBeliefError, ValueError):
    """An experiment or CLI configuration is malformed."""
