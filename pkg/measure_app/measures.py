"""
Log-concave measure families.

Each family is an immutable dataclass deriving from LogConcaveMeasure.
Densities are exposed through a vectorized `log_density` (rows of an
N x dim matrix, -inf outside the support), which is what the samplers,
the quadrature code and the checkers consume. `descriptor()` and
`from_descriptor()` convert to and from the JSON descriptor format.
"""
import logging
import math
from abc import ABC, abstractmethod
from dataclasses import dataclass, field, replace

import numpy as np
from scipy import integrate
from scipy.special import gammaln

from core.conf import lcpoly_setting
from core.exceptions import DimensionMismatchError, MeasureConfigurationError

from .random_streams import stream

logger = logging.getLogger(__name__)

LOG_2PI = math.log(2.0 * math.pi)
LOG_2 = math.log(2.0)

# Half-width beyond |x| at which a standard Gaussian line density drops below e^-800.
GAUSSIAN_TAIL = 40.0
# exp(-745) underflows to zero in double precision.
UNDERFLOW_LOG = 745.0
MAX_QUADRATURE_DIM = 4
ATTESTATION_PAIRS = 64


def _quadratic(points):
    return 0.5 * np.sum(points * points, axis=1)


def _quartic(points):
    squared = np.sum(points * points, axis=1)
    return 0.25 * squared * squared


def _logcosh(points):
    return np.sum(np.logaddexp(points, -points) - LOG_2, axis=1)


POTENTIALS = {
    'quadratic': _quadratic,
    'quartic': _quartic,
    'logcosh': _logcosh,
}


def log_unit_ball_volume(dim):
    return 0.5 * dim * math.log(math.pi) - float(gammaln(0.5 * dim + 1.0))


def _as_points(points, dim):
    points = np.asarray(points, dtype=float)
    if points.ndim == 1:
        points = points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != dim:
        raise DimensionMismatchError(dim, points.shape[-1], what='point')
    return points


def _ball_chord(x, u, radius):
    """Parameters t with |x + t u| <= radius, or None if the line misses."""
    b = float(np.dot(x, u))
    c = float(np.dot(x, x)) - radius * radius
    a = float(np.dot(u, u))
    disc = b * b - a * c
    if disc < 0.0:
        return None
    root = math.sqrt(disc)
    return (-b - root) / a, (-b + root) / a


def _ball_ranges(dim, radius):
    """nquad ranges for the ball |y| <= radius, innermost variable first."""
    def bounds(*outer):
        rest = radius * radius - sum(v * v for v in outer)
        half = math.sqrt(max(rest, 0.0))
        return [-half, half]
    return [bounds] * (dim - 1) + [[-radius, radius]]


class LogConcaveMeasure(ABC):
    """
    Base class of the measure families.

    Subclasses set `family` and implement the log-density, the chord of a
    line through the support, and (where available) an exact sampler.
    """
    family = None
    has_exact_sampler = True

    @property
    @abstractmethod
    def dim(self):
        """Ambient dimension."""

    @property
    def log_normalizer(self):
        """log of the normalizing constant, or None while unknown."""
        return 0.0

    @property
    def is_normalized(self):
        return self.log_normalizer is not None

    @property
    def normalization(self):
        return self.log_normalizer if self.is_normalized else 'unnormalized'

    @property
    def is_bounded(self):
        return self.support_radius() is not None

    @abstractmethod
    def log_density(self, points):
        """Log-density at each row of an N x dim matrix; -inf off the support."""

    @abstractmethod
    def line_chord(self, x, u):
        """
        Interval (lo, hi) of t for which x + t u lies in the support.

        Unbounded families return a window outside of which the density
        along the line is numerically zero.
        """

    def sample_exact(self, n, rng):
        raise MeasureConfigurationError(f"{self.family} has no exact sampler")

    def center(self):
        """A point of the support interior; hit-and-run chains start here."""
        return np.zeros(self.dim)

    def support_radius(self):
        """Radius of a centered ball containing the support; None if unbounded."""
        return None

    def support_bounds(self):
        """Per-coordinate (lower, upper) arrays of a box containing the support."""
        return np.full(self.dim, -np.inf), np.full(self.dim, np.inf)

    def normalized(self):
        return self

    def fiber_ranges(self, basis):
        """
        Integration ranges over the hyperplane spanned by the columns of basis.

        Returns:
            tuple[list, list[dict]]: nquad ranges and per-level options.
        """
        k = basis.shape[1]
        return [(-np.inf, np.inf)] * k, [{} for _ in range(k)]

    def density(self, x):
        """Density at the single point x."""
        x = np.asarray(x, dtype=float).ravel()
        if x.size != self.dim:
            raise DimensionMismatchError(self.dim, x.size)
        return float(np.exp(self.log_density(x.reshape(1, -1))[0]))

    @abstractmethod
    def descriptor(self):
        """JSON-ready descriptor {"family": ..., "dim": ..., parameters}."""


@dataclass(frozen=True)
class StandardGaussian(LogConcaveMeasure):
    n: int
    family = 'standard_gaussian'

    def __post_init__(self):
        if self.n < 1:
            raise MeasureConfigurationError(f"dim must be positive, got {self.n}")

    @property
    def dim(self):
        return self.n

    @property
    def log_normalizer(self):
        return 0.5 * self.n * LOG_2PI

    def log_density(self, points):
        points = _as_points(points, self.n)
        return -0.5 * np.sum(points * points, axis=1) - self.log_normalizer

    def line_chord(self, x, u):
        reach = float(np.linalg.norm(x)) + GAUSSIAN_TAIL
        return -reach, reach

    def sample_exact(self, n, rng):
        return rng.standard_normal((n, self.n))

    def descriptor(self):
        return {'family': self.family, 'dim': self.n}


@dataclass(frozen=True)
class ProductExponential(LogConcaveMeasure):
    """Product of symmetric Laplace laws (lambda_i / 2) exp(-lambda_i |x_i|)."""
    rates: tuple
    family = 'product_exponential'

    def __post_init__(self):
        rates = tuple(float(r) for r in self.rates)
        if not rates:
            raise MeasureConfigurationError("product_exponential needs at least one rate")
        if not all(math.isfinite(r) and r > 0 for r in rates):
            raise MeasureConfigurationError(f"rates must be positive and finite, got {rates}")
        object.__setattr__(self, 'rates', rates)

    @property
    def dim(self):
        return len(self.rates)

    @property
    def log_normalizer(self):
        return sum(LOG_2 - math.log(r) for r in self.rates)

    def log_density(self, points):
        points = _as_points(points, self.dim)
        rates = np.asarray(self.rates)
        return -np.abs(points) @ rates - self.log_normalizer

    def line_chord(self, x, u):
        # sum_i rate_i |x_i + t u_i| >= min(rates) (|t| - |x|)
        reach = float(np.linalg.norm(x)) + (UNDERFLOW_LOG + 55.0) / min(self.rates)
        return -reach, reach

    def sample_exact(self, n, rng):
        scales = 1.0 / np.asarray(self.rates)
        return rng.laplace(0.0, scales, size=(n, self.dim))

    def descriptor(self):
        return {'family': self.family, 'dim': self.dim, 'rates': list(self.rates)}


@dataclass(frozen=True)
class UniformBox(LogConcaveMeasure):
    lower: tuple
    upper: tuple
    family = 'uniform_box'

    def __post_init__(self):
        lower = tuple(float(v) for v in self.lower)
        upper = tuple(float(v) for v in self.upper)
        if len(lower) != len(upper) or not lower:
            raise MeasureConfigurationError("lower and upper must be non-empty and of equal length")
        if not all(math.isfinite(a) and math.isfinite(b) and a < b for a, b in zip(lower, upper)):
            raise MeasureConfigurationError(f"box needs finite lower < upper, got {lower}, {upper}")
        object.__setattr__(self, 'lower', lower)
        object.__setattr__(self, 'upper', upper)

    @property
    def dim(self):
        return len(self.lower)

    @property
    def log_normalizer(self):
        return sum(math.log(b - a) for a, b in zip(self.lower, self.upper))

    def log_density(self, points):
        points = _as_points(points, self.dim)
        inside = np.all((points >= self.lower) & (points <= self.upper), axis=1)
        return np.where(inside, -self.log_normalizer, -np.inf)

    def line_chord(self, x, u):
        lo, hi = -np.inf, np.inf
        for xi, ui, a, b in zip(x, u, self.lower, self.upper):
            if ui == 0.0:
                if not a <= xi <= b:
                    return None
                continue
            t1, t2 = (a - xi) / ui, (b - xi) / ui
            lo = max(lo, min(t1, t2))
            hi = min(hi, max(t1, t2))
        if lo > hi:
            return None
        return float(lo), float(hi)

    def sample_exact(self, n, rng):
        return rng.uniform(self.lower, self.upper, size=(n, self.dim))

    def center(self):
        return 0.5 * (np.asarray(self.lower) + np.asarray(self.upper))

    def support_radius(self):
        corner = np.maximum(np.abs(self.lower), np.abs(self.upper))
        return float(np.linalg.norm(corner))

    def support_bounds(self):
        return np.asarray(self.lower), np.asarray(self.upper)

    def fiber_ranges(self, basis):
        lower, upper = np.asarray(self.lower), np.asarray(self.upper)
        vertices = np.array(np.meshgrid(*zip(lower, upper), indexing='ij')).reshape(self.dim, -1).T
        ranges, opts = [], []
        for k in range(basis.shape[1]):
            column = basis[:, k]
            projections = vertices @ column
            lo, hi = float(projections.min()), float(projections.max())
            breakpoints = sorted({float(v) for v in projections if lo < v < hi})
            ranges.append((lo, hi))
            opts.append({'points': breakpoints} if breakpoints else {})
        return ranges, opts

    def descriptor(self):
        return {'family': self.family, 'dim': self.dim,
                'lower': list(self.lower), 'upper': list(self.upper)}


@dataclass(frozen=True)
class UniformBall(LogConcaveMeasure):
    n: int
    radius: float = 1.0
    family = 'uniform_ball'

    def __post_init__(self):
        radius = float(self.radius)
        if self.n < 1:
            raise MeasureConfigurationError(f"dim must be positive, got {self.n}")
        if not (math.isfinite(radius) and radius > 0):
            raise MeasureConfigurationError(f"radius must be positive and finite, got {radius}")
        object.__setattr__(self, 'radius', radius)

    @property
    def dim(self):
        return self.n

    @property
    def log_normalizer(self):
        return log_unit_ball_volume(self.n) + self.n * math.log(self.radius)

    def log_density(self, points):
        points = _as_points(points, self.n)
        inside = np.sum(points * points, axis=1) <= self.radius * self.radius
        return np.where(inside, -self.log_normalizer, -np.inf)

    def line_chord(self, x, u):
        return _ball_chord(np.asarray(x, float), np.asarray(u, float), self.radius)

    def sample_exact(self, n, rng):
        directions = rng.standard_normal((n, self.n))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
        radii = self.radius * rng.random(n) ** (1.0 / self.n)
        return directions * radii[:, None]

    def support_radius(self):
        return self.radius

    def support_bounds(self):
        return np.full(self.n, -self.radius), np.full(self.n, self.radius)

    def fiber_ranges(self, basis):
        k = basis.shape[1]
        return _ball_ranges(k, self.radius), [{} for _ in range(k)]

    def descriptor(self):
        return {'family': self.family, 'dim': self.n, 'radius': self.radius}


@dataclass(frozen=True)
class GeneralPotential(LogConcaveMeasure):
    """
    Density e^{-V} restricted to the centered ball of the given radius.

    `potential` maps an N x dim matrix onto the N values of V. The convex
    flag is the caller's attestation that V is convex; it is spot-checked
    at construction.
    """
    n: int
    potential: object = field(compare=False)
    radius: float
    convex: bool = True
    potential_name: str = 'custom'
    log_z: float = None
    family = 'general_potential'
    has_exact_sampler = False

    def __post_init__(self):
        if self.n < 1:
            raise MeasureConfigurationError(f"dim must be positive, got {self.n}")
        if self.radius is None:
            raise MeasureConfigurationError("general_potential needs a support radius")
        radius = float(self.radius)
        if not (math.isfinite(radius) and radius > 0):
            raise MeasureConfigurationError(f"radius must be positive and finite, got {radius}")
        object.__setattr__(self, 'radius', radius)
        if not self.convex:
            raise MeasureConfigurationError("general_potential requires a convex potential")
        if not callable(self.potential):
            raise MeasureConfigurationError("potential must be callable")
        violations = midpoint_concavity_violations(self, stream(0, 'attestation'),
                                                   pairs=ATTESTATION_PAIRS)
        if violations:
            raise MeasureConfigurationError(
                f"potential {self.potential_name!r} failed {violations} midpoint convexity checks")

    @property
    def dim(self):
        return self.n

    @property
    def log_normalizer(self):
        return self.log_z

    def _offset(self):
        return self.log_z if self.log_z is not None else 0.0

    def log_density(self, points):
        points = _as_points(points, self.n)
        inside = np.sum(points * points, axis=1) <= self.radius * self.radius
        values = -np.asarray(self.potential(points), dtype=float) - self._offset()
        return np.where(inside, values, -np.inf)

    def line_chord(self, x, u):
        return _ball_chord(np.asarray(x, float), np.asarray(u, float), self.radius)

    def support_radius(self):
        return self.radius

    def support_bounds(self):
        return np.full(self.n, -self.radius), np.full(self.n, self.radius)

    def fiber_ranges(self, basis):
        k = basis.shape[1]
        return _ball_ranges(k, self.radius), [{} for _ in range(k)]

    def normalized(self):
        """
        Returns a copy carrying log Z, computed by nested adaptive quadrature.

        Raises:
            MeasureConfigurationError: dim exceeds the quadrature budget.
        """
        if self.log_z is not None:
            return self
        if self.n > MAX_QUADRATURE_DIM:
            raise MeasureConfigurationError(
                f"normalizing a general potential needs dim <= {MAX_QUADRATURE_DIM}, got {self.n}")
        tol = lcpoly_setting('LCPOLY_QUADRATURE_TOL', 1e-10)

        def integrand(*coords):
            point = np.array(coords).reshape(1, -1)
            return float(np.exp(-self.potential(point)[0]))

        mass, error = integrate.nquad(integrand, _ball_ranges(self.n, self.radius),
                                      opts={'epsabs': tol, 'epsrel': tol, 'limit': 200})
        logger.debug("normalized %s potential: Z=%.12g (error %.2g)", self.potential_name, mass, error)
        return replace(self, log_z=math.log(mass))

    def descriptor(self):
        return {'family': self.family, 'dim': self.n,
                'potential': self.potential_name, 'radius': self.radius}


def midpoint_concavity_violations(measure, rng, pairs=1000, tol=1e-9):
    """
    Counts random pairs (x, y) with log rho((x+y)/2) < (log rho(x) + log rho(y))/2 - tol.

    Pairs are drawn from the measure itself when it has an exact sampler,
    otherwise uniformly from its support ball.
    """
    source = measure if measure.has_exact_sampler else UniformBall(measure.dim, measure.support_radius())
    x = source.sample_exact(pairs, rng)
    y = source.sample_exact(pairs, rng)
    with np.errstate(invalid='ignore'):
        chord = 0.5 * (measure.log_density(x) + measure.log_density(y))
        ok = measure.log_density(0.5 * (x + y)) >= chord - tol
    return int(np.count_nonzero(~ok))


def standard_gaussian(dim):
    return StandardGaussian(dim)


def product_exponential(rates):
    return ProductExponential(tuple(rates))


def uniform_box(lower, upper):
    return UniformBox(tuple(lower), tuple(upper))


def uniform_ball(dim, radius=1.0):
    return UniformBall(dim, radius)


def general_potential(dim, potential, radius, convex=True, name=None):
    """
    Builds a general_potential measure.

    Args:
        dim (int): Ambient dimension.
        potential (str | callable): A registered potential name or a
            vectorized callable V.
        radius (float): Support radius R.
        convex (bool): Attestation that V is convex.
        name (str, optional): Descriptor name for a callable potential.
    """
    if isinstance(potential, str):
        if potential not in POTENTIALS:
            raise MeasureConfigurationError(
                f"unknown potential {potential!r}; known: {', '.join(sorted(POTENTIALS))}")
        name, potential = potential, POTENTIALS[potential]
    return GeneralPotential(dim, potential, radius, convex, name or 'custom')


def density(measure, x):
    return measure.density(x)


def from_descriptor(descriptor):
    """
    Rebuilds a measure from its descriptor dictionary.

    Raises:
        MeasureConfigurationError: Unknown family or inconsistent parameters.
    """
    family = descriptor.get('family')
    dim = descriptor.get('dim')
    if family == 'standard_gaussian':
        measure = standard_gaussian(dim)
    elif family == 'product_exponential':
        measure = product_exponential(descriptor['rates'])
    elif family == 'uniform_box':
        measure = uniform_box(descriptor['lower'], descriptor['upper'])
    elif family == 'uniform_ball':
        measure = uniform_ball(dim, descriptor.get('radius', 1.0))
    elif family == 'general_potential':
        measure = general_potential(dim, descriptor.get('potential'), descriptor.get('radius'))
    else:
        raise MeasureConfigurationError(f"unknown measure family {family!r}")
    if dim is not None and measure.dim != dim:
        raise MeasureConfigurationError(f"descriptor dim {dim} does not match parameters ({measure.dim})")
    return measure
