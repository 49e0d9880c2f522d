"""
One-dimensional pushforwards mu o f^-1, represented by the values f(X_i)
of a polynomial on a sample set.
"""
from dataclasses import dataclass

import numpy as np

from core.exceptions import DimensionMismatchError, PreconditionError
from poly_app.polynomial import evaluate_many, format_polynomial


@dataclass(frozen=True, eq=False)
class Pushforward1D:
    """
    Values of a polynomial on the points of a sample set.

    Attributes:
        values (numpy.ndarray): Read-only vector of length N >= 2.
        source (tuple): (sample set id, polynomial text), or None for
            values built directly.
    """
    values: np.ndarray
    source: tuple = None

    def __post_init__(self):
        values = np.array(self.values, dtype=float).ravel()
        if values.size < 2:
            raise PreconditionError(f"a pushforward needs at least two values, got {values.size}")
        if not np.all(np.isfinite(values)):
            raise PreconditionError("pushforward values must be finite")
        values.flags.writeable = False
        object.__setattr__(self, 'values', values)

    def __len__(self):
        return self.values.size

    def map(self, function, label=None):
        """A new pushforward with values function(values), e.g. np.abs."""
        return Pushforward1D(function(self.values), label)


def push(samples, polynomial):
    """
    Evaluates the polynomial on every sample point.

    Args:
        samples (SampleSet): Points of dimension polynomial.dim.
        polynomial (Polynomial): The map f.

    Returns:
        Pushforward1D: The empirical law of f under the sample.
    """
    if samples.dim != polynomial.dim:
        raise DimensionMismatchError(polynomial.dim, samples.dim, what='sample set')
    values = evaluate_many(polynomial, samples.points)
    return Pushforward1D(values, (samples.id, format_polynomial(polynomial)))


def moment_norm(pushforward, r):
    """
    Empirical L^r norm (mean |v|^r)^(1/r); r = 0 gives exp(mean log |v|).

    The 0-norm is 0 as soon as a single value vanishes.
    """
    if r < 0:
        raise PreconditionError(f"moment order must be non-negative, got {r}")
    magnitudes = np.abs(pushforward.values)
    if r == 0:
        if np.any(magnitudes == 0.0):
            return 0.0
        return float(np.exp(np.mean(np.log(magnitudes))))
    peak = magnitudes.max()
    if peak == 0.0:
        return 0.0
    return float(peak * np.mean((magnitudes / peak) ** r) ** (1.0 / r))


def mean_and_variance(pushforward):
    """Sample mean and unbiased sample variance."""
    values = pushforward.values
    return float(values.mean()), float(values.var(ddof=1))
