import math

import numpy as np
import pytest
from scipy import stats

from core.exceptions import NormalizationError, PreconditionError
from measure_app.measures import standard_gaussian
from measure_app.sampling import sample
from poly_app.parser import parse
from poly_app.polynomial import Polynomial
from pushforward_app.api.serializers import SweepRowSerializer, TVEstimateSerializer
from pushforward_app.oracle import tv_oracle_1d
from pushforward_app.pushforward import Pushforward1D, push
from pushforward_app.tv import (
    TVEstimate,
    coarsen,
    fit_loglog_slope,
    histogram_counts,
    histogram_tv_from_counts,
    resolve_bins,
    shift_family_tv,
    tv_histogram,
)


def normal_shift_tv(delta):
    return 2 * stats.norm.cdf(delta / 2) - 1


def chi_square_density(t):
    if t <= 0:
        return 0.0
    return math.exp(-t / 2) / math.sqrt(2 * math.pi * t)


class TestHistogramTV:

    def test_identical_inputs(self, gaussian_samples):
        f = push(gaussian_samples, parse("x1", 2))
        assert tv_histogram(f, f).value == 0.0

    def test_unit_normal_shift(self, gaussian_1d):
        samples = sample(gaussian_1d, 100_000, seed=41)
        x = push(samples, parse("x1", 1))
        shifted = push(sample(gaussian_1d, 100_000, seed=42), parse("x1 + 1", 1))
        estimate = tv_histogram(x, shifted)
        assert estimate.value == pytest.approx(normal_shift_tv(1.0), abs=0.02)
        assert estimate.bins == 47
        assert 0 < estimate.bootstrap_stderr < 0.01

    def test_disjoint_supports(self, rng):
        a = Pushforward1D(-1 - rng.random(1_000))
        b = Pushforward1D(1 + rng.random(1_000))
        estimate = tv_histogram(a, b, bins=32)
        assert estimate.value >= 1 - 1 / 32
        assert estimate.value <= 1.0

    def test_symmetric_and_bounded(self, rng):
        a = Pushforward1D(rng.standard_normal(3_000))
        b = Pushforward1D(rng.standard_normal(2_000) * 1.5 + 0.2)
        forward, backward = tv_histogram(a, b), tv_histogram(b, a)
        assert forward.value == backward.value
        assert 0.0 <= forward.value <= 1.0

    def test_coarsening_never_increases_tv(self, rng):
        a = rng.standard_normal(5_000)
        b = rng.standard_normal(5_000) ** 2
        count_a, count_b = histogram_counts(a, b, 64)
        fine = histogram_tv_from_counts(count_a, count_b)
        for factor in (2, 3, 5, 64):
            coarse = histogram_tv_from_counts(coarsen(count_a, factor), coarsen(count_b, factor))
            assert coarse <= fine + 1e-15
        assert histogram_tv_from_counts(coarsen(count_a, 64), coarsen(count_b, 64)) == 0.0

    @pytest.mark.parametrize('factor', [2.0, -0.5, 3.0, -7.0])
    def test_scale_invariance(self, gaussian_samples, factor):
        f = parse("x1^2 + 0.3*x2", 2)
        g = parse("x1^2", 2)
        reference = tv_histogram(push(gaussian_samples, f), push(gaussian_samples, g))
        scaled = tv_histogram(push(gaussian_samples, factor * f), push(gaussian_samples, factor * g))
        assert scaled.value == reference.value

    def test_translation_invariance(self, gaussian_samples):
        f = push(gaussian_samples, parse("x1*x2", 2))
        g = push(gaussian_samples, parse("x1*x2 + 0.05*x1", 2))
        reference = tv_histogram(f, g)
        moved = tv_histogram(Pushforward1D(f.values + 0.25), Pushforward1D(g.values + 0.25))
        assert moved.value == reference.value

    def test_bin_rules(self):
        assert resolve_bins('auto', 100_000, 100_000) == 47
        assert resolve_bins('sqrt', 100_000, 200_000) == 317
        assert resolve_bins('auto', 100, 100) == 16
        assert resolve_bins(10, 3, 3) == 6
        with pytest.raises(PreconditionError):
            resolve_bins('fd', 10, 10)

    def test_serializers(self):
        estimate = TVEstimate(0.25, 47, 0.01)
        assert TVEstimateSerializer(estimate).data == {'tv': 0.25, 'bins': 47, 'stderr': 0.01}
        row = SweepRowSerializer({'delta': 0.1, 'estimate': estimate}).data
        assert row == {'delta': 0.1, 'tv': 0.25, 'stderr': 0.01, 'bins': 47}


class TestOracle:

    def test_identical_densities(self):
        assert tv_oracle_1d(stats.norm.pdf, stats.norm.pdf) == 0.0

    @pytest.mark.parametrize('delta', [1.0, 0.3, 2.5])
    def test_normal_shift(self, delta):
        value = tv_oracle_1d(stats.norm.pdf, lambda t: stats.norm.pdf(t - delta))
        assert value == pytest.approx(normal_shift_tv(delta), abs=1e-9)

    def test_normal_shift_reference_value(self):
        assert tv_oracle_1d(stats.norm.pdf, lambda t: stats.norm.pdf(t - 1)) == pytest.approx(0.38292492, abs=1e-8)

    def test_chi_square_shift_is_grid_consistent(self):
        delta = 0.01
        coarse = tv_oracle_1d(chi_square_density, lambda t: chi_square_density(t - delta), (0.0, math.inf))
        fine = tv_oracle_1d(chi_square_density, lambda t: chi_square_density(t - delta), (0.0, math.inf),
                            scan_points=16_001)
        assert coarse == pytest.approx(fine, abs=1e-7)
        assert coarse == pytest.approx(2 * stats.norm.cdf(math.sqrt(delta)) - 1, abs=1e-7)

    def test_normalization_checked(self):
        with pytest.raises(NormalizationError):
            tv_oracle_1d(lambda t: 2 * stats.norm.pdf(t), stats.norm.pdf)


class TestShiftFamily:

    def test_zero_perturbation(self, gaussian_2d):
        estimates = shift_family_tv(gaussian_2d, parse("x1^2", 2), Polynomial.zero(2), [0.01, 0.1, 1.0], 5_000, 3)
        assert [e.value for e in estimates] == [0.0, 0.0, 0.0]

    def test_linear_shift_follows_closed_form(self, gaussian_1d):
        deltas = np.geomspace(1e-2, 1e-1, 5)
        estimates = shift_family_tv(gaussian_1d, parse("x1", 1), parse("1", 1), deltas, 100_000, 5, bins=8)
        values = [e.value for e in estimates]
        assert fit_loglog_slope(deltas, values) == pytest.approx(1.0, abs=0.1)
        big = shift_family_tv(gaussian_1d, parse("x1", 1), parse("1", 1), [1.0], 100_000, 5)[0]
        assert big.value == pytest.approx(normal_shift_tv(1.0), abs=0.02)

    def test_square_shift_has_half_exponent(self, gaussian_1d):
        deltas = np.geomspace(1e-3, 1e-1, 10)
        estimates = shift_family_tv(gaussian_1d, parse("x1^2", 1), parse("1", 1), deltas, 100_000, 6)
        slope = fit_loglog_slope(deltas, [e.value for e in estimates])
        assert 0.4 <= slope <= 0.6

    def test_reuses_given_samples(self, gaussian_2d):
        g, h = parse("x1^2 + x2", 2), parse("x1*x2", 2)
        drawn = shift_family_tv(gaussian_2d, g, h, [0.01, 0.1], 5_000, 7)
        reused = shift_family_tv(gaussian_2d, g, h, [0.01, 0.1], 5_000, 7,
                                 samples=sample(gaussian_2d, 5_000, 7))
        np.testing.assert_array_equal([e.value for e in reused], [e.value for e in drawn])
        np.testing.assert_array_equal([e.bootstrap_stderr for e in reused],
                                      [e.bootstrap_stderr for e in drawn])

    def test_deltas_must_be_sorted(self, gaussian_1d):
        with pytest.raises(PreconditionError):
            shift_family_tv(gaussian_1d, parse("x1", 1), parse("1", 1), [0.1, 0.01], 100, 1)


def test_fit_loglog_slope():
    xs = np.array([1.0, 10.0, 100.0, -1.0])
    assert fit_loglog_slope(xs, xs ** 0.5) == pytest.approx(0.5, rel=1e-12)
    with pytest.raises(PreconditionError):
        fit_loglog_slope([1.0, 2.0], [0.0, 0.0])
