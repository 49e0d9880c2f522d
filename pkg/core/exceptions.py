"""
Exception hierarchy shared by all lcpoly apps.

Every error raised on purpose by the numerical code derives from
LcpolyError, so the CLI can map it onto an exit code in one place.
"""


class LcpolyError(Exception):
    """Base class for all deliberate lcpoly errors."""


class DimensionMismatchError(LcpolyError, ValueError):
    """Two objects that must live in the same R^n do not."""

    def __init__(self, expected, actual, what='vector'):
        self.expected = expected
        self.actual = actual
        super().__init__(f"{what} has dimension {actual}, expected {expected}")


class PolynomialSyntaxError(LcpolyError, ValueError):
    """The expression text does not conform to the polynomial grammar."""

    def __init__(self, message, position):
        self.position = position
        super().__init__(f"{message} at position {position}")


class VariableIndexError(LcpolyError, ValueError):
    """A variable x<i> refers to a coordinate outside 1..dim."""

    def __init__(self, index, dim, position=None):
        self.index = index
        self.dim = dim
        self.position = position
        where = f" at position {position}" if position is not None else ""
        super().__init__(f"variable x{index} out of range for dim {dim}{where}")


class InvalidDirectionError(LcpolyError, ValueError):
    """A direction vector is zero, non-finite or not of unit length."""


class MeasureConfigurationError(LcpolyError, ValueError):
    """A measure family received parameters it cannot work with."""


class ZeroMassError(LcpolyError):
    """A one-dimensional bracket carries no probability mass."""


class InsufficientSamplesError(LcpolyError, ValueError):
    """Fewer samples than the estimator needs."""


class SingularCovarianceError(LcpolyError):
    """The sample covariance stays singular after the ridge repair."""


class QuadratureError(LcpolyError):
    """Numerical integration failed to produce a usable value."""


class NormalizationError(LcpolyError):
    """A density that must integrate to one does not."""


class DegenerateVarianceError(LcpolyError):
    """The reference polynomial has (numerically) zero variance."""

    def __init__(self, sigma):
        self.sigma = sigma
        super().__init__(f"degenerate variance: sigma_g = {sigma!r}")


class PreconditionError(LcpolyError, ValueError):
    """An operation was called outside its documented domain."""


class NoSmallBallHitsError(LcpolyError):
    """No sample value falls below the largest small-ball radius."""


class EmptySeriesError(LcpolyError, ValueError):
    """A plot was requested for an empty data series."""


class ConfigurationError(LcpolyError, ValueError):
    """An experiment configuration failed validation."""

    def __init__(self, errors):
        self.errors = errors
        super().__init__(f"invalid experiment configuration: {errors}")
