"""
Affine maps and isotropization of sample sets.
"""
import logging
from dataclasses import dataclass

import numpy as np
from scipy import linalg

from core.exceptions import (
    DimensionMismatchError,
    InsufficientSamplesError,
    PreconditionError,
    SingularCovarianceError,
)
from poly_app.polynomial import compose_affine

logger = logging.getLogger(__name__)

RIDGE = 1e-12
# The ridge leaves the whitened covariance off identity by about RIDGE / CONDITION_FLOOR.
CONDITION_FLOOR = 1e-4


@dataclass(frozen=True, eq=False)
class AffineMap:
    """The invertible map x -> matrix @ x + shift."""
    matrix: np.ndarray
    shift: np.ndarray

    def __post_init__(self):
        matrix = np.array(self.matrix, dtype=float)
        shift = np.array(self.shift, dtype=float).ravel()
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise PreconditionError(f"affine matrix must be square, got shape {matrix.shape}")
        if shift.size != matrix.shape[0]:
            raise DimensionMismatchError(matrix.shape[0], shift.size, what='affine shift')
        if not (np.all(np.isfinite(matrix)) and np.all(np.isfinite(shift))):
            raise PreconditionError("affine map has non-finite entries")
        if not np.isfinite(np.linalg.cond(matrix)) or np.linalg.det(matrix) == 0.0:
            raise SingularCovarianceError("affine matrix is singular")
        matrix.flags.writeable = False
        shift.flags.writeable = False
        object.__setattr__(self, 'matrix', matrix)
        object.__setattr__(self, 'shift', shift)

    @classmethod
    def identity(cls, dim):
        return cls(np.eye(dim), np.zeros(dim))

    @property
    def dim(self):
        return self.shift.size

    def apply(self, points):
        """Maps every row of an N x dim matrix (or a single point)."""
        points = np.asarray(points, dtype=float)
        if points.shape[-1] != self.dim:
            raise DimensionMismatchError(self.dim, points.shape[-1], what='point')
        return points @ self.matrix.T + self.shift

    __call__ = apply

    def inverse(self):
        inverse_matrix = np.linalg.inv(self.matrix)
        return AffineMap(inverse_matrix, -inverse_matrix @ self.shift)

    def compose(self, inner):
        """The map x -> self(inner(x))."""
        if inner.dim != self.dim:
            raise DimensionMismatchError(self.dim, inner.dim, what='affine map')
        return AffineMap(self.matrix @ inner.matrix, self.matrix @ inner.shift + self.shift)

    def transport(self, polynomial):
        """
        The polynomial q with q(self(x)) = polynomial(x).

        Composing with the inverse keeps the law of the polynomial: under the
        image measure mu o T^-1, q has the same distribution as p under mu.
        """
        inverse = self.inverse()
        return compose_affine(polynomial, inverse.matrix, inverse.shift)


def isotropize(samples):
    """
    Whitening map of a sample set.

    The sample covariance (ddof=1) receives a ridge of 1e-12 * trace / dim
    before its Cholesky factor L is taken; the map is x -> L^-1 (x - mean).
    Covariances whose smallest eigenvalue is below 1e-4 * trace / dim are
    rejected.

    Args:
        samples (SampleSet): At least dim + 1 points.

    Returns:
        AffineMap: T such that T(points) has mean 0 and covariance I.

    Raises:
        InsufficientSamplesError: N <= dim.
        SingularCovarianceError: The covariance stays singular after the ridge.
    """
    points = samples.points
    n, dim = points.shape
    if n <= dim:
        raise InsufficientSamplesError(f"isotropization needs more than {dim} points, got {n}")
    mean = points.mean(axis=0)
    covariance = np.atleast_2d(np.cov(points, rowvar=False))
    trace = float(np.trace(covariance))
    if not trace > 0:
        raise SingularCovarianceError("sample covariance vanishes")
    ridge = RIDGE * trace / dim
    smallest = float(linalg.eigvalsh(covariance)[0])
    if smallest < CONDITION_FLOOR * trace / dim:
        raise SingularCovarianceError(
            f"sample covariance is numerically singular (smallest eigenvalue {smallest:.3g})")
    logger.debug("isotropizing %d points in dim %d (ridge %.3g)", n, dim, ridge)
    try:
        factor = linalg.cholesky(covariance + ridge * np.eye(dim), lower=True)
    except linalg.LinAlgError as exc:
        raise SingularCovarianceError(f"covariance is singular beyond ridge repair: {exc}") from exc
    whitening = linalg.solve_triangular(factor, np.eye(dim), lower=True)
    try:
        return AffineMap(whitening, -whitening @ mean)
    except SingularCovarianceError as exc:
        raise SingularCovarianceError("whitening matrix is singular") from exc
