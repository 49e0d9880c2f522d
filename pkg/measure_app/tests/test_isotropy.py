import numpy as np
import pytest

from core.exceptions import InsufficientSamplesError, SingularCovarianceError
from measure_app.isotropy import AffineMap, isotropize
from measure_app.measures import standard_gaussian
from measure_app.random_streams import stream
from measure_app.sampling import SampleSet, SamplingMethod, sample
from poly_app.parser import parse
from poly_app.polynomial import evaluate_many


def sample_set(points):
    return SampleSet(points, 0, SamplingMethod.exact(), {'family': 'custom', 'dim': points.shape[1]})


class TestIsotropize:

    def test_gaussian_map_is_near_identity(self, gaussian_2d):
        transform = isotropize(sample(gaussian_2d, 1_000_000, seed=3))
        assert np.linalg.norm(transform.matrix - np.eye(2), ord=2) < 0.01
        assert np.linalg.norm(transform.shift) < 0.01

    def test_whitened_moments(self, gaussian_samples):
        transform = isotropize(gaussian_samples)
        whitened = transform.apply(gaussian_samples.points)
        assert np.max(np.abs(whitened.mean(axis=0))) < 1e-10
        assert np.linalg.norm(np.cov(whitened, rowvar=False) - np.eye(2), ord=2) < 1e-8

    def test_recovers_affine_image(self):
        rng = stream(4, 'affine-image')
        lower = np.array([[2.0, 0.0, 0.0], [0.5, 1.0, 0.0], [-1.0, 0.3, 0.2]])
        c = np.array([5.0, -1.0, 2.0])
        points = c + rng.standard_normal((200_000, 3)) @ lower.T
        transform = isotropize(sample_set(points))
        whitened = transform.apply(points)
        assert np.max(np.abs(whitened.mean(axis=0))) < 1e-10
        assert np.linalg.norm(np.cov(whitened, rowvar=False) - np.eye(3), ord=2) < 1e-8
        inverse = np.linalg.inv(lower)
        assert np.linalg.norm(transform.matrix - inverse, ord=2) < 0.1
        np.testing.assert_allclose(transform.shift, -inverse @ c, atol=0.1)

    def test_ill_conditioned_covariance_is_whitened_exactly(self):
        points = stream(5, 'ill-conditioned').standard_normal((20_000, 2)) * np.array([1.0, 0.02])
        whitened = isotropize(sample_set(points)).apply(points)
        assert np.linalg.norm(np.cov(whitened, rowvar=False) - np.eye(2), ord=2) < 1e-8

    def test_covariance_below_condition_floor(self):
        points = stream(5, 'ill-conditioned').standard_normal((20_000, 2)) * np.array([1.0, 1e-3])
        with pytest.raises(SingularCovarianceError):
            isotropize(sample_set(points))

    def test_needs_more_points_than_dim(self):
        with pytest.raises(InsufficientSamplesError):
            isotropize(sample_set(np.array([[0.0, 1.0], [2.0, 3.0]])))

    def test_collinear_points(self):
        t = np.linspace(0.0, 1.0, 50)
        with pytest.raises(SingularCovarianceError):
            isotropize(sample_set(np.column_stack([t, 2 * t])))


class TestAffineMap:

    def test_inverse_and_compose(self):
        transform = AffineMap([[2.0, 1.0], [0.0, 1.0]], [1.0, -1.0])
        identity = transform.compose(transform.inverse())
        np.testing.assert_allclose(identity.matrix, np.eye(2), atol=1e-15)
        np.testing.assert_allclose(identity.shift, np.zeros(2), atol=1e-15)

    def test_singular_matrix_rejected(self):
        with pytest.raises(SingularCovarianceError):
            AffineMap([[1.0, 2.0], [2.0, 4.0]], [0.0, 0.0])

    def test_transport_preserves_values(self):
        transform = AffineMap([[2.0, 1.0], [0.0, 3.0]], [1.0, -1.0])
        p = parse("x1^2*x2 - x2 + 4", 2)
        points = stream(8, 'transport').standard_normal((20, 2))
        np.testing.assert_allclose(evaluate_many(transform.transport(p), transform.apply(points)),
                                   evaluate_many(p, points), rtol=1e-10, atol=1e-10)

    def test_identity(self):
        assert np.array_equal(AffineMap.identity(3).apply(np.ones((2, 3))), np.ones((2, 3)))
