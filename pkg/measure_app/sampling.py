"""
Samplers for log-concave measures.

`sample` draws exact i.i.d. points where a family allows it and falls
back to hit-and-run otherwise. `hit_and_run` works on every family and
uses `sample_line_logconcave`, an inverse-CDF sampler on an adaptive
trapezoid grid, for the one-dimensional step along each chord.
"""
import hashlib
import json
import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize
from scipy.special import logsumexp

from core.conf import lcpoly_setting
from core.exceptions import PreconditionError, ZeroMassError

from .random_streams import stream

logger = logging.getLogger(__name__)

FLATNESS_GRID = 65
INITIAL_INTERVALS = 64
TRIM_LOG = 40.0
# Target change of the log-mass between refinements; LCPOLY_LINE_GRID_MAX_INTERVALS may stop refinement first.
MASS_TOL = 1e-10


@dataclass(frozen=True)
class SamplingMethod:
    kind: str
    burn_in: int = 0
    thinning: int = 1

    @classmethod
    def exact(cls):
        return cls('exact')

    @classmethod
    def hit_and_run(cls, dim, burn_in=None, thinning=None):
        """Hit-and-run with the configured defaults for the missing parameters."""
        if burn_in is None:
            burn_in = lcpoly_setting('LCPOLY_HIT_AND_RUN_BURN_IN', 1000)
        if thinning is None:
            thinning = dim * lcpoly_setting('LCPOLY_HIT_AND_RUN_THINNING_PER_DIM', 10)
        if burn_in < 0 or thinning < 1:
            raise PreconditionError(f"need burn_in >= 0 and thinning >= 1, got {burn_in}, {thinning}")
        return cls('hit_and_run', int(burn_in), int(thinning))

    def as_dict(self):
        if self.kind == 'exact':
            return {'kind': 'exact'}
        return {'kind': self.kind, 'burn_in': self.burn_in, 'thinning': self.thinning}


@dataclass(frozen=True, eq=False)
class SampleSet:
    """
    N points drawn from a measure, with everything needed to redraw them.

    Attributes:
        points (numpy.ndarray): Read-only N x dim matrix.
        seed (int): Experiment seed.
        method (SamplingMethod): How the points were produced.
        descriptor (dict): Descriptor of the sampled measure.
    """
    points: np.ndarray
    seed: int
    method: SamplingMethod
    descriptor: dict

    def __post_init__(self):
        points = np.array(self.points, dtype=float)
        if points.ndim != 2 or points.shape[0] < 1:
            raise PreconditionError("a sample set needs at least one point")
        if not np.all(np.isfinite(points)):
            raise PreconditionError("sample points must be finite")
        points.flags.writeable = False
        object.__setattr__(self, 'points', points)

    @property
    def dim(self):
        return self.points.shape[1]

    @property
    def size(self):
        return self.points.shape[0]

    def __len__(self):
        return self.size

    @property
    def id(self):
        """Short content hash of (descriptor, seed, method, N)."""
        echo = json.dumps({'descriptor': self.descriptor, 'seed': self.seed,
                           'method': self.method.as_dict(), 'n': self.size}, sort_keys=True)
        return hashlib.sha256(echo.encode('utf-8')).hexdigest()[:12]


def sample(measure, n, seed, method=None):
    """
    Draws n points from measure, deterministically in seed.

    Args:
        measure (LogConcaveMeasure): The target.
        n (int): Number of points (>= 1).
        seed (int): Experiment seed; the stream used is (seed, 'sample').
        method (SamplingMethod, optional): Defaults to exact sampling when
            the family supports it, hit-and-run otherwise.

    Returns:
        SampleSet: The drawn points.
    """
    if n < 1:
        raise PreconditionError(f"need at least one sample, got {n}")
    if method is None:
        method = SamplingMethod.exact() if measure.has_exact_sampler else SamplingMethod.hit_and_run(measure.dim)
    logger.debug("sampling %s dim=%d n=%d method=%s", measure.family, measure.dim, n, method.kind)
    if method.kind == 'exact':
        points = measure.sample_exact(n, stream(seed, 'sample'))
    elif method.kind == 'hit_and_run':
        points = hit_and_run(measure, n, seed, method.burn_in, method.thinning).points
    else:
        raise PreconditionError(f"unknown sampling method {method.kind!r}")
    return SampleSet(points, seed, method, measure.descriptor())


def hit_and_run(measure, n, seed, burn_in=None, thinning=None, start=None):
    """
    Random-direction hit-and-run chain on the measure.

    Each step draws a uniform direction u, restricts the density to the
    chord through the current point and moves to an exact draw from that
    one-dimensional log-concave law. After `burn_in` steps every
    `thinning`-th state is kept.

    Args:
        measure (LogConcaveMeasure): The target; any family.
        n (int): Number of kept states.
        seed (int): Experiment seed; the stream used is (seed, 'hit-and-run').
        burn_in (int, optional): Discarded initial steps.
        thinning (int, optional): Steps between kept states.
        start (array_like, optional): Initial state, defaults to measure.center().

    Returns:
        SampleSet: The kept states.
    """
    if n < 1:
        raise PreconditionError(f"need at least one sample, got {n}")
    method = SamplingMethod.hit_and_run(measure.dim, burn_in, thinning)
    rng = stream(seed, 'hit-and-run')
    x = measure.center() if start is None else np.array(start, dtype=float)
    if not np.isfinite(measure.log_density(x.reshape(1, -1))[0]):
        raise PreconditionError("hit-and-run must start inside the support")

    kept = np.empty((n, measure.dim))
    total = method.burn_in + n * method.thinning
    count = 0
    for step in range(total):
        u = rng.standard_normal(measure.dim)
        u /= np.linalg.norm(u)
        chord = measure.line_chord(x, u)
        if chord is not None:
            origin = x

            def along_line(t, origin=origin, u=u):
                return measure.log_density(origin[None, :] + np.asarray(t)[:, None] * u[None, :])

            x = origin + sample_line_logconcave(along_line, chord, rng) * u
        if step >= method.burn_in and (step - method.burn_in + 1) % method.thinning == 0:
            kept[count] = x
            count += 1
    logger.debug("hit-and-run on %s: %d steps, %d states kept", measure.family, total, count)
    return SampleSet(kept, seed, method, measure.descriptor())


def _line_values(log_density_on_line, t):
    values = np.asarray(log_density_on_line(np.atleast_1d(np.asarray(t, dtype=float))), dtype=float)
    return np.where(np.isnan(values), -np.inf, values)


def _draw_from_grid(grid, values, rng, size):
    """Inverse-CDF draws from the piecewise-linear density through (grid, exp(values))."""
    h = np.diff(grid)
    left, right = values[:-1], values[1:]
    with np.errstate(divide='ignore'):
        log_mass = np.log(h) + np.logaddexp(left, right) - math.log(2.0)
    total = logsumexp(log_mass)
    weights = np.exp(log_mass - total)
    cdf = np.cumsum(weights)
    targets = rng.random(size) * cdf[-1]
    index = np.minimum(np.searchsorted(cdf, targets, side='right'), len(weights) - 1)
    previous = np.where(index > 0, cdf[np.maximum(index - 1, 0)], 0.0)
    with np.errstate(divide='ignore', invalid='ignore'):
        fraction = np.clip((targets - previous) / weights[index], 0.0, 1.0)
        peak = np.maximum(left[index], right[index])
        f0 = np.exp(left[index] - peak)
        f1 = np.exp(right[index] - peak)
        # root of f0 s + (f1 - f0) s^2 / 2 = fraction (f0 + f1) / 2 on [0, 1]
        numerator = fraction * (f0 + f1)
        denominator = f0 + np.sqrt(f0 * f0 + (f1 - f0) * numerator)
        offset = np.where(denominator > 0, numerator / denominator, fraction)
    return grid[index] + np.clip(offset, 0.0, 1.0) * h[index]


def sample_line_logconcave(log_density_on_line, bracket, rng, size=None):
    """
    Draws from the normalized restriction of a log-concave density to a bracket.

    Args:
        log_density_on_line (callable): Maps a 1-D array of t values onto
            their (unnormalized) log-densities; -inf outside the support.
        bracket (tuple[float, float]): The interval [lo, hi].
        rng (numpy.random.Generator): Source of randomness.
        size (int, optional): Number of draws; a single float when omitted.

    Returns:
        float | numpy.ndarray: The draw(s).

    Raises:
        ZeroMassError: No point of the bracket has finite log-density.
    """
    lo, hi = float(bracket[0]), float(bracket[1])
    if not lo <= hi:
        raise PreconditionError(f"bracket [{lo}, {hi}] is empty")
    count = 1 if size is None else int(size)
    if hi == lo:
        draws = np.full(count, lo)
        return lo if size is None else draws

    coarse = np.linspace(lo, hi, FLATNESS_GRID)
    coarse_values = _line_values(log_density_on_line, coarse)
    interior = coarse_values[1:-1]
    ends = coarse_values[[0, -1]]
    if np.all(np.isfinite(interior)) and np.all(interior == interior[0]) \
            and np.all((ends == interior[0]) | np.isneginf(ends)):
        draws = lo + rng.random(count) * (hi - lo)
        return float(draws[0]) if size is None else draws

    k = int(np.argmax(coarse_values))
    peak_value = coarse_values[k]
    if not np.isfinite(peak_value):
        raise ZeroMassError(f"no mass on [{lo}, {hi}]")
    search = (coarse[max(k - 1, 0)], coarse[min(k + 1, FLATNESS_GRID - 1)])
    result = optimize.minimize_scalar(lambda t: -_line_values(log_density_on_line, t)[0],
                                      bounds=search, method='bounded')
    mode = float(result.x)
    mode_value = _line_values(log_density_on_line, mode)[0]
    if not mode_value >= peak_value:
        mode, mode_value = float(coarse[k]), float(peak_value)
    floor = mode_value - TRIM_LOG

    def above_floor(t):
        return _line_values(log_density_on_line, t)[0] - floor

    a, b = lo, hi
    if coarse_values[0] < floor and mode > lo:
        a = optimize.bisect(above_floor, lo, mode, xtol=1e-12 * (1.0 + abs(hi - lo)))
    if coarse_values[-1] < floor and mode < hi:
        b = optimize.bisect(above_floor, mode, hi, xtol=1e-12 * (1.0 + abs(hi - lo)))
    a = max(lo, a - 1e-12 * (1.0 + abs(hi - lo)))
    b = min(hi, b + 1e-12 * (1.0 + abs(hi - lo)))

    max_intervals = lcpoly_setting('LCPOLY_LINE_GRID_MAX_INTERVALS', 1024)
    intervals = INITIAL_INTERVALS
    previous_total = None
    while True:
        grid = np.linspace(a, b, intervals + 1)
        values = _line_values(log_density_on_line, grid)
        with np.errstate(divide='ignore'):
            total = math.log(0.5 * (b - a) / intervals) + logsumexp(np.logaddexp(values[:-1], values[1:]))
        if not np.isfinite(total):
            raise ZeroMassError(f"no mass on [{lo}, {hi}]")
        if previous_total is not None and abs(total - previous_total) < MASS_TOL:
            break
        if intervals >= max_intervals:
            logger.debug("line grid capped at %d intervals, log-mass change %.3g", intervals,
                         math.nan if previous_total is None else abs(total - previous_total))
            break
        previous_total = total
        intervals *= 2
    draws = _draw_from_grid(grid, values, rng, count)
    return float(draws[0]) if size is None else draws
