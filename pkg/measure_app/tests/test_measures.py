import math

import numpy as np
import pytest

from core.exceptions import DimensionMismatchError, MeasureConfigurationError
from measure_app.api.serializers import MeasureDescriptorSerializer
from measure_app.measures import (
    density,
    from_descriptor,
    general_potential,
    midpoint_concavity_violations,
    product_exponential,
    standard_gaussian,
    uniform_ball,
    uniform_box,
)
from measure_app.random_streams import stream


FAMILIES = [
    pytest.param(lambda: standard_gaussian(3), id='gaussian'),
    pytest.param(lambda: product_exponential([1.0, 0.5]), id='laplace'),
    pytest.param(lambda: uniform_box([-1.0, 0.0], [1.0, 2.0]), id='box'),
    pytest.param(lambda: uniform_ball(3, 2.0), id='ball'),
    pytest.param(lambda: general_potential(2, 'quartic', 3.0), id='quartic'),
    pytest.param(lambda: general_potential(2, 'logcosh', 3.0), id='logcosh'),
]


class TestDensity:

    def test_gaussian_at_origin(self):
        assert density(standard_gaussian(1), [0.0]) == pytest.approx(0.3989422804, abs=1e-10)

    def test_unit_box_indicator(self, unit_box_1d):
        assert density(unit_box_1d, [0.5]) == 1.0
        assert density(unit_box_1d, [2.0]) == 0.0

    def test_laplace_at_origin(self, laplace_1d):
        assert density(laplace_1d, [0.0]) == pytest.approx(0.5, rel=1e-15)

    def test_ball_density_is_inverse_volume(self):
        assert density(uniform_ball(2, 2.0), [0.3, -0.4]) == pytest.approx(1 / (4 * math.pi))

    def test_dimension_mismatch(self, gaussian_2d):
        with pytest.raises(DimensionMismatchError):
            density(gaussian_2d, [0.0, 0.0, 0.0])

    def test_unnormalized_potential_until_normalized(self):
        measure = general_potential(1, 'quadratic', 10.0)
        assert measure.normalization == 'unnormalized'
        assert density(measure, [0.0]) == 1.0
        normalized = measure.normalized()
        assert normalized.log_normalizer == pytest.approx(0.5 * math.log(2 * math.pi), abs=1e-8)
        assert density(normalized, [0.0]) == pytest.approx(1 / math.sqrt(2 * math.pi), rel=1e-8)

    def test_potential_outside_radius(self):
        assert density(general_potential(2, 'quartic', 1.0), [1.0, 1.0]) == 0.0


class TestLogConcavity:

    @pytest.mark.parametrize('make_measure', FAMILIES)
    def test_midpoint_concavity(self, make_measure):
        measure = make_measure()
        assert midpoint_concavity_violations(measure, stream(1, 'midpoint'), pairs=1000) == 0

    def test_convexity_attestation_required(self):
        with pytest.raises(MeasureConfigurationError):
            general_potential(1, 'quadratic', 1.0, convex=False)

    def test_non_convex_potential_rejected(self):
        with pytest.raises(MeasureConfigurationError):
            general_potential(2, lambda x: -0.5 * np.sum(x * x, axis=1), 2.0)

    def test_radius_required(self):
        with pytest.raises(MeasureConfigurationError):
            general_potential(2, 'quartic', None)

    @pytest.mark.parametrize('lower, upper', [([0.0], [0.0]), ([1.0], [0.0]), ([0.0, 0.0], [1.0])])
    def test_box_needs_interior(self, lower, upper):
        with pytest.raises(MeasureConfigurationError):
            uniform_box(lower, upper)

    def test_rates_must_be_positive(self):
        with pytest.raises(MeasureConfigurationError):
            product_exponential([1.0, 0.0])


class TestLineChord:

    def test_box_chord(self):
        box = uniform_box([0.0, 0.0], [1.0, 1.0])
        lo, hi = box.line_chord(np.array([0.5, 0.5]), np.array([1.0, 0.0]))
        assert (lo, hi) == (-0.5, 0.5)

    def test_box_chord_misses(self):
        box = uniform_box([0.0, 0.0], [1.0, 1.0])
        assert box.line_chord(np.array([0.5, 2.0]), np.array([1.0, 0.0])) is None

    def test_ball_chord(self):
        ball = uniform_ball(2, 1.0)
        u = np.array([0.6, 0.8])
        lo, hi = ball.line_chord(np.zeros(2), u)
        assert (lo, hi) == pytest.approx((-1.0, 1.0))


class TestDescriptors:

    @pytest.mark.parametrize('make_measure', FAMILIES[:5])
    def test_round_trip(self, make_measure):
        measure = make_measure()
        rebuilt = from_descriptor(measure.descriptor())
        assert rebuilt.descriptor() == measure.descriptor()

    def test_unknown_family(self):
        with pytest.raises(MeasureConfigurationError):
            from_descriptor({'family': 'cauchy', 'dim': 1})

    def test_serializer_builds_measure_from_alias(self):
        serializer = MeasureDescriptorSerializer(data={'family': 'uniform-box', 'dim': 1,
                                                       'lower': [0], 'upper': [1]})
        assert serializer.is_valid(), serializer.errors
        measure = serializer.save()
        assert measure.descriptor() == {'family': 'uniform_box', 'dim': 1, 'lower': [0.0], 'upper': [1.0]}

    def test_serializer_represents_measure(self, laplace_1d):
        assert MeasureDescriptorSerializer(laplace_1d).data == {
            'family': 'product_exponential', 'dim': 1, 'rates': [1.0]}

    def test_serializer_rejects_unknown_field(self):
        serializer = MeasureDescriptorSerializer(data={'family': 'gaussian', 'dim': 2, 'sigma': 3})
        assert not serializer.is_valid()
        assert 'sigma' in serializer.errors

    def test_serializer_checks_lengths(self):
        serializer = MeasureDescriptorSerializer(data={'family': 'laplace', 'dim': 2, 'rates': [1.0]})
        assert not serializer.is_valid()
        assert 'rates' in serializer.errors

    def test_serializer_requires_family_parameters(self):
        serializer = MeasureDescriptorSerializer(data={'family': 'general_potential', 'dim': 2})
        assert not serializer.is_valid()
        assert set(serializer.errors) == {'potential', 'radius'}


class TestRandomStreams:

    def test_same_key_same_stream(self):
        assert np.array_equal(stream(5, 'a', 3).random(10), stream(5, 'a', 3).random(10))

    def test_keys_split_streams(self):
        assert not np.array_equal(stream(5, 'a', 3).random(10), stream(5, 'a', 4).random(10))
        assert not np.array_equal(stream(5, 'a').random(10), stream(6, 'a').random(10))
