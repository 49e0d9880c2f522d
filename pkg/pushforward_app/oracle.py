"""
Quadrature oracle for the TV distance between two 1-D densities.

The line is cut at every sign change of p - q; on each piece the signed
integral of p - q is computed with adaptive Gauss-Kronrod quadrature and
TV = 1/2 * sum |integral over piece|. Sign changes are located on a scan
grid that is uniform on the working window and geometric towards finite
domain ends (where densities such as t^(-1/2) e^(-t/2) concentrate), then
refined with Brent's method.
"""
import logging
import math
import warnings

import numpy as np
from scipy import integrate, optimize

from core.exceptions import NormalizationError, PreconditionError, QuadratureError

logger = logging.getLogger(__name__)

WINDOW = 120.0
NORMALIZATION_TOL = 1e-8
PIECE_TOL = 1e-11
BIG = 1e300


def _window(lo, hi):
    if math.isfinite(lo) and math.isfinite(hi):
        return lo, hi
    if math.isfinite(lo):
        return lo, lo + WINDOW
    if math.isfinite(hi):
        return hi - WINDOW, hi
    return -0.5 * WINDOW, 0.5 * WINDOW


def _scan_nodes(lo, hi, scan_points):
    window_lo, window_hi = _window(lo, hi)
    width = window_hi - window_lo
    nodes = [np.linspace(window_lo, window_hi, scan_points)]
    offsets = np.geomspace(1e-12 * max(width, 1.0), width, scan_points // 2)
    if math.isfinite(lo):
        nodes.append(lo + offsets)
    if math.isfinite(hi):
        nodes.append(hi - offsets)
    nodes = np.unique(np.concatenate(nodes))
    return nodes[(nodes > lo) & (nodes < hi)]


def _finite(value):
    value = float(value)
    if math.isnan(value):
        return 0.0
    return max(-BIG, min(BIG, value))


def sign_changes(difference, lo, hi, scan_points=4001):
    """Points in (lo, hi) where difference changes sign."""
    nodes = _scan_nodes(lo, hi, scan_points)
    values = np.array([_finite(difference(t)) for t in nodes])
    nonzero = np.flatnonzero(values)
    nodes, signs = nodes[nonzero], np.sign(values[nonzero])
    roots = []
    # runs of exact zeros (e.g. both densities underflowed) only count between opposite signs
    for i in np.flatnonzero(signs[:-1] * signs[1:] < 0):
        roots.append(optimize.brentq(lambda t: _finite(difference(t)), nodes[i], nodes[i + 1],
                                     xtol=np.finfo(float).tiny, rtol=4 * np.finfo(float).eps))
    return sorted(set(roots))


def _pieces(lo, hi, breakpoints):
    cuts = [lo, *breakpoints, hi]
    if not math.isfinite(lo) and len(cuts) > 2:
        cuts.insert(1, cuts[1] - 1.0)
    if not math.isfinite(hi) and len(cuts) > 2:
        cuts.insert(-1, cuts[-2] + 1.0)
    return list(zip(cuts[:-1], cuts[1:]))


def _integrate(function, pieces):
    total = 0.0
    parts = []
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', integrate.IntegrationWarning)
        for a, b in pieces:
            value, _ = integrate.quad(function, a, b, epsabs=PIECE_TOL, epsrel=PIECE_TOL, limit=400)
            parts.append(value)
            total += value
    for warning in caught:
        logger.warning("tv oracle quadrature: %s", warning.message)
    if not math.isfinite(total):
        raise QuadratureError("quadrature returned a non-finite value")
    return total, parts


def tv_oracle_1d(density_p, density_q, domain=(-math.inf, math.inf), scan_points=4001):
    """
    1/2 * integral of |p - q| over the domain.

    Args:
        density_p (callable): Scalar density p(t).
        density_q (callable): Scalar density q(t).
        domain (tuple[float, float]): Integration interval, ends may be infinite.
        scan_points (int): Size of the uniform part of the sign-change scan.

    Returns:
        float: The TV distance.

    Raises:
        NormalizationError: p or q does not integrate to 1 within 1e-8.
    """
    lo, hi = float(domain[0]), float(domain[1])
    if not lo < hi:
        raise PreconditionError(f"empty domain ({lo}, {hi})")

    def difference(t):
        return density_p(t) - density_q(t)

    breakpoints = sign_changes(difference, lo, hi, scan_points)
    pieces = _pieces(lo, hi, breakpoints)
    for name, density in (('p', density_p), ('q', density_q)):
        mass, _ = _integrate(density, pieces)
        if abs(mass - 1.0) > NORMALIZATION_TOL:
            raise NormalizationError(f"density {name} integrates to {mass!r}, expected 1")
    _, parts = _integrate(difference, pieces)
    return 0.5 * math.fsum(abs(part) for part in parts)
