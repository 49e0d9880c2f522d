"""
Ensembles of checker cells and the empirical constants they calibrate.

A main-bound ensemble enumerates cells (mu, g, h, delta) with
f = g + delta * h. Cells are grouped by (mu, g, h): a group draws one
sample set and evaluates every delta of the grid on it. Groups run on a
thread pool capped by LCPOLY_THREADS; each group owns the random stream
(seed, 'estimate-constant', group), so results do not depend on the
number of threads.
"""
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from core.conf import lcpoly_setting
from core.exceptions import PreconditionError
from measure_app.measures import from_descriptor
from measure_app.random_streams import stream
from measure_app.sampling import sample
from poly_app.parser import parse
from poly_app.polynomial import add, random_polynomial, scale

from .checkers import check_carbery_wright, check_main_bound
from .reports import ConstantEstimate

logger = logging.getLogger(__name__)

DEFAULT_DELTAS = tuple(float(v) for v in np.geomspace(1e-3, 1e-1, 10))

DEFAULT_MEASURES = (
    {'family': 'standard_gaussian', 'dim': 1},
    {'family': 'uniform_box', 'dim': 2, 'lower': [0.0, 0.0], 'upper': [1.0, 1.0]},
    {'family': 'product_exponential', 'dim': 2, 'rates': [1.0, 2.0]},
    {'family': 'standard_gaussian', 'dim': 3},
    {'family': 'uniform_box', 'dim': 4, 'lower': [-1.0] * 4, 'upper': [1.0] * 4},
    {'family': 'product_exponential', 'dim': 4, 'rates': [1.0] * 4},
    {'family': 'standard_gaussian', 'dim': 2},
)


def _seed_from(rng):
    return int(rng.integers(2**63))


def _run_ordered(function, items):
    """function over items on the configured thread pool, results in item order."""
    threads = max(1, int(lcpoly_setting('LCPOLY_THREADS', 1)))
    items = list(items)
    if threads == 1 or len(items) <= 1:
        return [function(item) for item in items]
    with ThreadPoolExecutor(max_workers=threads) as executor:
        return list(executor.map(function, items))


@dataclass(frozen=True)
class EnsembleSpec:
    """
    Description of a main-bound ensemble.

    Attributes:
        measures (tuple[dict, ...]): Measure descriptors, cycled over groups.
        trials (int): Number of (mu, g, h, delta) cells.
        deltas (tuple[float, ...]): Positive, non-decreasing shift sizes.
        coefficient_scale (float): Random coefficients are uniform on [-scale, scale].
        g (str, optional): Fixed text for g; random of degree d when omitted.
        h (str, optional): Fixed text for h; random of degree d when omitted.
        bins (int | str): Bin rule of the TV estimates.
    """
    measures: tuple = DEFAULT_MEASURES
    trials: int = 200
    deltas: tuple = DEFAULT_DELTAS
    coefficient_scale: float = 1.0
    g: str = None
    h: str = None
    bins: object = 'auto'

    def __post_init__(self):
        if not self.measures:
            raise PreconditionError("an ensemble needs at least one measure")
        if self.trials < 1:
            raise PreconditionError(f"an ensemble needs at least one cell, got {self.trials}")
        deltas = tuple(float(v) for v in self.deltas)
        if not deltas or any(v <= 0 for v in deltas) or any(b < a for a, b in zip(deltas, deltas[1:])):
            raise PreconditionError("deltas must be positive and sorted")
        object.__setattr__(self, 'deltas', deltas)
        object.__setattr__(self, 'measures', tuple(dict(m) for m in self.measures))

    @property
    def groups(self):
        return math.ceil(self.trials / len(self.deltas))

    def as_dict(self):
        return {'measures': [dict(m) for m in self.measures], 'trials': self.trials,
                'deltas': list(self.deltas), 'coefficient_scale': self.coefficient_scale,
                'g': self.g, 'h': self.h, 'bins': self.bins}


def default_ensemble(d, trials=200):
    """The default main-bound ensemble: random degree-d pairs on families of dim <= 4."""
    if d < 1:
        raise PreconditionError(f"degree must be positive, got {d}")
    return EnsembleSpec(trials=trials)


def _group_ratios(d, spec, measures, group, n, seed):
    rng = stream(seed, 'estimate-constant', group)
    measure = measures[group % len(measures)]
    if spec.g is not None:
        g = parse(spec.g, measure.dim)
    else:
        g = random_polynomial(measure.dim, d, spec.coefficient_scale, rng)
    if spec.h is not None:
        h = parse(spec.h, measure.dim)
    else:
        h = random_polynomial(measure.dim, d, spec.coefficient_scale, rng)
    sample_seed = _seed_from(rng)
    samples = sample(measure, n, sample_seed)
    count = min(len(spec.deltas), spec.trials - group * len(spec.deltas))
    ratios = []
    for delta in spec.deltas[:count]:
        f = add(g, scale(h, delta))
        report = check_main_bound(measure, f, g, n, sample_seed, bins=spec.bins,
                                  samples=samples, min_degree=min(d, 2))
        ratios.append(report.ratio)
    logger.info("estimate-constant group %d/%d (%s): max ratio %.4g",
                group + 1, spec.groups, measure.family, max(ratios))
    return ratios


def estimate_constant(d, ensemble=None, n=100_000, seed=0):
    """
    Empirical C(d): the maximum main-bound ratio over an ensemble.

    Args:
        d (int): Degree of the random polynomials (and of fixed ones).
        ensemble (EnsembleSpec, optional): Defaults to default_ensemble(d).
        n (int): Sample size per group.
        seed (int): Experiment seed.

    Returns:
        ConstantEstimate: Ratios in cell order with their running maximum.
    """
    spec = ensemble or default_ensemble(d)
    measures = [from_descriptor(m) for m in spec.measures]
    groups = _run_ordered(lambda group: _group_ratios(d, spec, measures, group, n, seed),
                          range(spec.groups))
    ratios = [ratio for group in groups for ratio in group]
    config = {'d': d, 'ensemble': spec.as_dict(), 'n': int(n), 'seed': int(seed)}
    estimate = ConstantEstimate.from_ratios(d, ratios, config)
    logger.info("estimate-constant d=%d: C_hat=%.6g over %d cells", d, estimate.c_hat, estimate.trials)
    return estimate


DEFAULT_SMALL_BALL_MEASURES = (
    {'family': 'standard_gaussian', 'dim': 1},
    {'family': 'uniform_box', 'dim': 2, 'lower': [0.0, 0.0], 'upper': [1.0, 1.0]},
    {'family': 'product_exponential', 'dim': 3, 'rates': [1.0, 1.0, 1.0]},
    {'family': 'standard_gaussian', 'dim': 4},
    {'family': 'uniform_box', 'dim': 3, 'lower': [-1.0] * 3, 'upper': [1.0] * 3},
    {'family': 'product_exponential', 'dim': 2, 'rates': [2.0, 0.5]},
)


def small_ball_ensemble(d, cells=60, n=100_000, seed=0, measures=DEFAULT_SMALL_BALL_MEASURES,
                        coefficient_scale=1.0):
    """
    Small-ball checks for random degree-d polynomials on a cycle of measures.

    Returns:
        list[tuple[list[CheckReport], float | None]]: Per cell the reports
        and the fitted small-ball exponent.
    """
    if cells < 1:
        raise PreconditionError(f"need at least one cell, got {cells}")
    built = [from_descriptor(m) for m in measures]

    def run(cell):
        rng = stream(seed, 'small-ball', cell)
        measure = built[cell % len(built)]
        f = random_polynomial(measure.dim, d, coefficient_scale, rng)
        reports = check_carbery_wright(measure, f, None, n, _seed_from(rng))
        exponent = reports[0].details['exponent']
        logger.debug("small-ball cell %d (%s): exponent %s", cell, measure.family, exponent)
        return reports, exponent

    return _run_ordered(run, range(cells))
