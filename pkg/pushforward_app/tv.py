"""
Histogram estimates of the total variation distance between pushforwards.

Both samples are binned on shared equal-mass bins of the pooled sample.
The block boundaries of the sorted pooled sample are placed symmetrically
(position floor(k M / B) in the lower half, M - floor((B - k) M / B) in
the upper half), and a value v lands in the bin given by the number of
edges <= v. The binning therefore depends on ranks only, which makes the
estimate invariant under any increasing affine map of the data, and
under reflection when the pooled values are distinct.

Binned TV is the supremum over test functions that are constant on the
bins, so in expectation it bounds the true TV from below.
"""
import logging
import math
from dataclasses import dataclass

import numpy as np

from core.conf import lcpoly_setting
from core.exceptions import PreconditionError
from measure_app.random_streams import stream
from measure_app.sampling import sample

from .pushforward import Pushforward1D, push

logger = logging.getLogger(__name__)

MIN_BINS = 16
MAX_BINS = 4096
BIN_RULES = ('auto', 'sqrt')
LOWER_BOUND_NOTE = ("histogram-TV is a lower bound of true TV in expectation "
                    "up to sampling noise")


@dataclass(frozen=True)
class TVEstimate:
    value: float
    bins: int
    bootstrap_stderr: float
    direction_note: str = LOWER_BOUND_NOTE

    def as_dict(self):
        return {'tv': self.value, 'bins': self.bins, 'stderr': self.bootstrap_stderr}


def resolve_bins(bins, n_a, n_b):
    """
    Number of bins for samples of sizes n_a and n_b.

    Args:
        bins (int | str): A positive integer, "auto" (cube-root rule) or
            "sqrt" (square-root rule); rules are clamped to [16, 4096].
    """
    n = min(n_a, n_b)
    if bins == 'auto':
        count = math.ceil(n ** (1.0 / 3.0))
    elif bins == 'sqrt':
        count = math.ceil(math.sqrt(n))
    elif isinstance(bins, (int, np.integer)) and not isinstance(bins, bool) and bins >= 1:
        return int(min(bins, n_a + n_b))
    else:
        raise PreconditionError(f"bins must be a positive integer, 'auto' or 'sqrt', got {bins!r}")
    return int(min(max(count, MIN_BINS), MAX_BINS, n_a + n_b))


def block_boundaries(size, bins):
    """Positions c_1..c_{B-1} splitting `size` sorted values into B blocks, symmetric under reversal."""
    k = np.arange(1, bins)
    lower = (k * size) // bins
    upper = size - ((bins - k) * size) // bins
    return np.where(2 * k <= bins, lower, upper)


def histogram_counts(a, b, bins):
    """
    Counts of a and b on shared equal-mass bins of the pooled values.

    Returns:
        tuple[numpy.ndarray, numpy.ndarray]: Counts per bin for a and b.
    """
    pooled = np.sort(np.concatenate([a, b]))
    edges = pooled[block_boundaries(pooled.size, bins)]
    count_a = np.bincount(np.searchsorted(edges, a, side='right'), minlength=bins)
    count_b = np.bincount(np.searchsorted(edges, b, side='right'), minlength=bins)
    return count_a, count_b


def histogram_tv_from_counts(count_a, count_b):
    """Half the L1 distance between the two normalized histograms."""
    count_a = np.asarray(count_a, dtype=float)
    count_b = np.asarray(count_b, dtype=float)
    if count_a.shape != count_b.shape:
        raise PreconditionError("histograms must have the same number of bins")
    total_a, total_b = count_a.sum(axis=-1), count_b.sum(axis=-1)
    if np.any(total_a == 0) or np.any(total_b == 0):
        raise PreconditionError("histograms must be non-empty")
    p = count_a / np.expand_dims(total_a, -1)
    q = count_b / np.expand_dims(total_b, -1)
    # summation order independent of bin order
    return np.minimum(0.5 * np.sort(np.abs(p - q), axis=-1).sum(axis=-1), 1.0)


def coarsen(counts, factor):
    """Merges each run of `factor` adjacent bins; a shorter final run is kept."""
    counts = np.asarray(counts)
    if factor < 1:
        raise PreconditionError(f"coarsening factor must be positive, got {factor}")
    starts = np.arange(0, counts.shape[-1], factor)
    return np.add.reduceat(counts, starts, axis=-1)


def _bootstrap_stderr(count_a, count_b, rng):
    resamples = lcpoly_setting('LCPOLY_BOOTSTRAP_RESAMPLES', 200)
    n_a, n_b = int(count_a.sum()), int(count_b.sum())
    boot_a = rng.multinomial(n_a, count_a / n_a, size=resamples)
    boot_b = rng.multinomial(n_b, count_b / n_b, size=resamples)
    return float(np.std(histogram_tv_from_counts(boot_a, boot_b), ddof=1))


def tv_histogram(a, b, bins='auto', seed=0):
    """
    Histogram estimate of TV(law(a), law(b)).

    Args:
        a (Pushforward1D): First sample of values.
        b (Pushforward1D): Second sample of values.
        bins (int | str): Bin count or rule, see resolve_bins.
        seed (int): Seed of the bootstrap stream.

    Returns:
        TVEstimate: Estimate in [0, 1] with its bootstrap standard error.
    """
    values_a = a.values if isinstance(a, Pushforward1D) else np.asarray(a, dtype=float)
    values_b = b.values if isinstance(b, Pushforward1D) else np.asarray(b, dtype=float)
    if values_a.size == 0 or values_b.size == 0:
        raise PreconditionError("tv_histogram needs two non-empty samples")
    count = resolve_bins(bins, values_a.size, values_b.size)
    if np.array_equal(values_a, values_b):
        return TVEstimate(0.0, count, 0.0)
    count_a, count_b = histogram_counts(values_a, values_b, count)
    value = float(histogram_tv_from_counts(count_a, count_b))
    stderr = _bootstrap_stderr(count_a, count_b, stream(seed, 'tv-bootstrap', count))
    return TVEstimate(value, count, stderr)


def shift_family_tv(measure, g, h, deltas, n, seed, bins='auto', samples=None):
    """
    TV between the laws of g and g + delta * h for every delta.

    One sample set is drawn and reused for all deltas (common random
    numbers), so the sweep is smooth in delta.

    Args:
        measure (LogConcaveMeasure): The measure mu.
        g (Polynomial): Base polynomial.
        h (Polynomial): Perturbation direction.
        deltas (sequence[float]): Positive, non-decreasing shift sizes.
        n (int): Sample size.
        seed (int): Experiment seed.
        bins (int | str): Bin rule passed to tv_histogram.
        samples (SampleSet, optional): Draw of (measure, n, seed) to reuse.

    Returns:
        list[TVEstimate]: One estimate per delta.
    """
    deltas = np.asarray(deltas, dtype=float)
    if deltas.size == 0 or np.any(deltas <= 0) or np.any(np.diff(deltas) < 0):
        raise PreconditionError("deltas must be positive and sorted")
    if samples is None:
        samples = sample(measure, n, seed)
    base = push(samples, g)
    direction = push(samples, h).values
    estimates = []
    for index, delta in enumerate(deltas):
        shifted = Pushforward1D(base.values + delta * direction)
        estimates.append(tv_histogram(base, shifted, bins=bins, seed=seed + index))
    logger.debug("shift sweep over %d deltas on %s", deltas.size, measure.family)
    return estimates


def fit_loglog_slope(xs, ys):
    """
    Least-squares slope of log y against log x over pairs with x, y > 0.

    Raises:
        PreconditionError: Fewer than two usable pairs.
    """
    xs = np.asarray(xs, dtype=float)
    ys = np.asarray(ys, dtype=float)
    usable = (xs > 0) & (ys > 0) & np.isfinite(xs) & np.isfinite(ys)
    if np.count_nonzero(usable) < 2 or np.unique(xs[usable]).size < 2:
        raise PreconditionError("a log-log fit needs two distinct positive points")
    slope, _ = np.polyfit(np.log(xs[usable]), np.log(ys[usable]), 1)
    return float(slope)
