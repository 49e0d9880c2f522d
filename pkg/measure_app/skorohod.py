"""
Total variation of the Skorohod derivative D_e mu.

For a log-concave density rho and a unit vector e,

    ||D_e mu||_TV = 2 * integral over e-perp of max_t rho(x + t e) dx,

since rho is unimodal on every line parallel to e. The fiber maximum is
found by bounded scalar minimization of -log rho along the chord, and the
outer integral by nested adaptive quadrature over e-perp.
"""
import logging
import math
import warnings

import numpy as np
from scipy import integrate, linalg, optimize

from core.conf import lcpoly_setting
from core.exceptions import DimensionMismatchError, MeasureConfigurationError

from .measures import MAX_QUADRATURE_DIM

logger = logging.getLogger(__name__)


def fiber_max(measure, x, u):
    """max over t of the density along x + t u; 0 when the line misses the support."""
    chord = measure.line_chord(x, u)
    if chord is None:
        return 0.0
    lo, hi = chord

    def log_rho(t):
        return float(measure.log_density((x + t * u).reshape(1, -1))[0])

    candidates = [log_rho(lo), log_rho(hi)]
    if hi - lo > 1e-14 * (1.0 + abs(lo)):
        result = optimize.minimize_scalar(lambda t: -log_rho(t), bounds=(lo, hi), method='bounded',
                                          options={'xatol': 1e-10})
        candidates.append(log_rho(result.x))
    else:
        candidates.append(log_rho(0.5 * (lo + hi)))
    best = max(candidates)
    return math.exp(best) if np.isfinite(best) else 0.0


def skorohod_tv(measure, e):
    """
    ||D_e mu||_TV by quadrature.

    Args:
        measure (LogConcaveMeasure): A family of dimension <= 4.
        e (Direction): The derivative direction.

    Returns:
        float: The total variation, positive.

    Raises:
        MeasureConfigurationError: dim exceeds the quadrature budget.
    """
    if e.dim != measure.dim:
        raise DimensionMismatchError(measure.dim, e.dim, what='direction')
    if measure.dim > MAX_QUADRATURE_DIM:
        raise MeasureConfigurationError(
            f"skorohod_tv supports dim <= {MAX_QUADRATURE_DIM}, got {measure.dim}")
    measure = measure.normalized()
    u = e.as_array()
    if measure.dim == 1:
        return 2.0 * fiber_max(measure, np.zeros(1), u)

    basis = linalg.null_space(u.reshape(1, -1))
    tol = lcpoly_setting('LCPOLY_QUADRATURE_TOL', 1e-10)
    ranges, level_opts = measure.fiber_ranges(basis)
    opts = [dict(epsabs=tol, epsrel=tol, limit=200, **extra) for extra in level_opts]

    def integrand(*coords):
        return fiber_max(measure, basis @ np.asarray(coords), u)

    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', integrate.IntegrationWarning)
        value, error = integrate.nquad(integrand, ranges, opts=opts)
    for warning in caught:
        logger.warning("skorohod quadrature for %s: %s", measure.family, warning.message)
    logger.debug("skorohod_tv %s dim=%d: %.12g (error %.2g)", measure.family, measure.dim, 2 * value, error)
    return 2.0 * value
