import numpy as np
import pytest

from check_app.calibration import (
    DEFAULT_DELTAS,
    EnsembleSpec,
    default_ensemble,
    estimate_constant,
    small_ball_ensemble,
)
from core.exceptions import PreconditionError

GAUSSIAN_1D = ({'family': 'standard_gaussian', 'dim': 1},)
GAUSSIAN_2D = ({'family': 'standard_gaussian', 'dim': 2},)


class TestEnsembleSpec:

    def test_defaults(self):
        spec = default_ensemble(2)
        assert spec.trials == 200
        assert spec.deltas == DEFAULT_DELTAS
        assert len(spec.deltas) == 10
        assert spec.deltas[0] == pytest.approx(1e-3)
        assert spec.groups == 20
        assert all(m['dim'] <= 4 for m in spec.measures)

    @pytest.mark.parametrize('kwargs', [
        {'measures': ()},
        {'trials': 0},
        {'deltas': ()},
        {'deltas': (0.1, 0.01)},
        {'deltas': (0.0, 0.1)},
    ])
    def test_rejects(self, kwargs):
        with pytest.raises(PreconditionError):
            EnsembleSpec(**kwargs)

    def test_echo(self):
        spec = EnsembleSpec(GAUSSIAN_1D, trials=3, deltas=[0.1], g='x1', h='1', bins=8)
        assert spec.as_dict() == {'measures': [{'family': 'standard_gaussian', 'dim': 1}], 'trials': 3,
                                  'deltas': [0.1], 'coefficient_scale': 1.0, 'g': 'x1', 'h': '1',
                                  'bins': 8}


class TestEstimateConstant:

    def test_trivial_ensemble(self):
        spec = EnsembleSpec(GAUSSIAN_2D, trials=20, h='0')
        estimate = estimate_constant(2, spec, n=2000, seed=1)
        assert estimate.trials == 20
        assert estimate.c_hat == 0.0

    def test_linear_shift_calibration(self):
        spec = EnsembleSpec(GAUSSIAN_1D, trials=5, deltas=tuple(np.geomspace(1e-2, 1e-1, 5)),
                            g='x1', h='1', bins=8)
        estimate = estimate_constant(1, spec, n=100_000, seed=2)
        # (2 Phi(delta / 2) - 1) / delta -> 1 / sqrt(2 pi)
        assert estimate.ratios[-1] == pytest.approx(0.3988, abs=0.04)
        assert 0.35 < estimate.c_hat < 0.5

    def test_partial_last_group(self):
        spec = EnsembleSpec(GAUSSIAN_2D, trials=7, deltas=(0.01, 0.02, 0.05, 0.1, 0.2))
        estimate = estimate_constant(2, spec, n=2000, seed=3)
        assert estimate.trials == 7
        assert list(estimate.stability) == sorted(estimate.stability)
        assert estimate.c_hat == max(estimate.ratios)

    def test_independent_of_thread_count(self, settings):
        spec = EnsembleSpec(trials=30, deltas=(0.01, 0.1))
        settings.LCPOLY_THREADS = 1
        single = estimate_constant(2, spec, n=3000, seed=4)
        settings.LCPOLY_THREADS = 4
        pooled = estimate_constant(2, spec, n=3000, seed=4)
        assert single.ratios == pooled.ratios

    @pytest.mark.slow
    def test_default_ensemble_is_finite(self):
        estimate = estimate_constant(2, n=100_000, seed=5)
        assert estimate.trials == 200
        assert np.isfinite(estimate.c_hat)
        assert estimate.c_hat > 0
        assert estimate.last_increase(100) < 0.25

    @pytest.mark.slow
    def test_extending_delta_grid_down_one_decade(self):
        base = estimate_constant(2, EnsembleSpec(), n=100_000, seed=5)
        smaller = tuple(float(v) for v in np.geomspace(1e-4, 1e-3, 5)[:-1])
        extended_deltas = smaller + DEFAULT_DELTAS
        # same groups, so every default cell is reproduced inside the extended ensemble
        groups = EnsembleSpec().groups
        extended = estimate_constant(2, EnsembleSpec(trials=groups * len(extended_deltas),
                                                     deltas=extended_deltas), n=100_000, seed=5)
        assert extended.c_hat >= base.c_hat
        assert (extended.c_hat - base.c_hat) / base.c_hat < 0.25


class TestSmallBallEnsemble:

    def test_exponents_respect_degree(self):
        cells = small_ball_ensemble(2, cells=6, n=20_000, seed=6)
        assert len(cells) == 6
        for reports, exponent in cells:
            assert len(reports) == 5
            assert exponent >= 0.5 - 0.1

    @pytest.mark.slow
    def test_default_ensemble(self):
        cells = small_ball_ensemble(2, cells=60, n=100_000, seed=7)
        assert min(exponent for _, exponent in cells) >= 0.5 - 0.1

    def test_rejects_empty(self):
        with pytest.raises(PreconditionError):
            small_ball_ensemble(2, cells=0)
