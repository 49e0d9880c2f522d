"""
Inequality checkers.

Every checker evaluates the two sides of one inequality on a seeded
sample set and returns a CheckReport (or several). Right-hand sides are
reported without their unknown absolute constants; the ratio is what the
calibration code maximizes over ensembles. Checkers accept an optional
`samples` argument so that several checks can share one sample set
(common random numbers).
"""
import logging
import math
import warnings

import numpy as np
from scipy import integrate

from core.exceptions import (
    DegenerateVarianceError,
    DimensionMismatchError,
    NoSmallBallHitsError,
    PreconditionError,
    QuadratureError,
)
from measure_app.isotropy import isotropize
from measure_app.sampling import SampleSet, sample
from measure_app.skorohod import fiber_max, skorohod_tv
from poly_app.polynomial import (
    Direction,
    Polynomial,
    directional_derivative,
    evaluate_many,
    format_polynomial,
    gradient,
)
from pushforward_app.pushforward import Pushforward1D, mean_and_variance, moment_norm, push
from pushforward_app.tv import fit_loglog_slope, tv_histogram

from .reports import CheckReport, EpsilonSplitReport, ratio_of
from .signals import report_ready

logger = logging.getLogger(__name__)

SIGMA_FLOOR = 1e-12
DENSITY_VARIANCE_BOUND = 1.0 / 12.0
DENSITY_VARIANCE_TOL = 1e-9
NORM_CHAIN_TOL = 1e-12
SMALL_BALL_HITS = 100
BATCHES = 20


def _echo(value):
    if isinstance(value, Polynomial):
        return format_polynomial(value)
    if isinstance(value, Direction):
        return list(value.components)
    if isinstance(value, np.ndarray):
        return [float(v) for v in value]
    if isinstance(value, (list, tuple)):
        return [_echo(v) for v in value]
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    return value


def _config(measure, n, seed, **inputs):
    config = {'measure': measure.descriptor(), 'n': int(n), 'seed': int(seed)}
    config.update({key: _echo(value) for key, value in inputs.items()})
    return config


def _emit(report):
    report_ready.send(sender=report.name, report=report)
    return report


def _check_dims(measure, *polynomials):
    for p in polynomials:
        if p.dim != measure.dim:
            raise DimensionMismatchError(measure.dim, p.dim, what='polynomial')


def _samples(measure, n, seed, samples):
    if samples is None:
        return sample(measure, n, seed)
    if samples.dim != measure.dim:
        raise DimensionMismatchError(measure.dim, samples.dim, what='sample set')
    return samples


def batch_stderr(statistic, *columns, batches=BATCHES):
    """
    Standard error of a statistic from contiguous batches of the rows.

    Args:
        statistic (callable): Maps column slices onto a float.
        *columns (numpy.ndarray): Arrays sharing their first axis.
        batches (int): Number of batches.

    Returns:
        float: std(batch values) / sqrt(batches), NaN for fewer than two
        rows per batch.
    """
    size = columns[0].shape[0]
    if size < 2 * batches:
        return math.nan
    edges = np.linspace(0, size, batches + 1).astype(int)
    values = np.array([statistic(*(column[a:b] for column in columns))
                       for a, b in zip(edges[:-1], edges[1:])], dtype=float)
    values = values[np.isfinite(values)]
    if values.size < 2:
        return math.nan
    return float(np.std(values, ddof=1) / math.sqrt(values.size))


def _norm(values, r):
    return moment_norm(Pushforward1D(values), r)


def check_main_bound(measure, f, g, n, seed, bins='auto', samples=None, min_degree=2):
    """
    sigma_g^(1/d) * TV(mu o f^-1, mu o g^-1) against ||f - g||_2^(1/d).

    Args:
        measure (LogConcaveMeasure): The measure mu.
        f (Polynomial): Perturbed polynomial.
        g (Polynomial): Reference polynomial; its standard deviation weighs the TV.
        n (int): Sample size.
        seed (int): Experiment seed (sampling and bootstrap).
        bins (int | str): Bin rule of the TV estimate.
        samples (SampleSet, optional): Shared sample set; drawn from seed when omitted.
        min_degree (int): Smallest admissible d = max(deg f, deg g); 1 only
            for oracle calibration on linear families.

    Returns:
        CheckReport: "main-bound"; stderr is the bootstrap error of the ratio.

    Raises:
        PreconditionError: d < min_degree.
        DegenerateVarianceError: The sample deviation of g is below 1e-12.
    """
    _check_dims(measure, f, g)
    d = max(f.degree, g.degree)
    if d < max(min_degree, 1):
        raise PreconditionError(f"main bound needs degree >= {max(min_degree, 1)}, got {d}")
    samples = _samples(measure, n, seed, samples)
    pf, pg = push(samples, f), push(samples, g)
    _, variance = mean_and_variance(pg)
    sigma = math.sqrt(variance)
    if not sigma >= SIGMA_FLOOR:
        raise DegenerateVarianceError(sigma)
    estimate = tv_histogram(pf, pg, bins=bins, seed=seed)
    distance = _norm(pf.values - pg.values, 2)
    weight = sigma ** (1.0 / d)
    rhs_core = distance ** (1.0 / d)
    stderr = weight * estimate.bootstrap_stderr / rhs_core if rhs_core > 0 else 0.0
    return _emit(CheckReport(
        'main-bound', weight * estimate.value, rhs_core, stderr,
        config=_config(measure, samples.size, seed, f=f, g=g, bins=bins),
        details={'d': d, 'sigma_g': sigma, 'tv': estimate.value, 'bins': estimate.bins,
                 'l2_distance': distance},
    ))


def quantile_t_grid(abs_values, points=5):
    """Radii at the 0.1% .. 10% empirical quantiles of |f|, positive ones only."""
    radii = np.quantile(abs_values, np.geomspace(1e-3, 1e-1, points))
    radii = np.unique(radii[radii > 0])
    if radii.size == 0:
        raise NoSmallBallHitsError("|f| vanishes on more than 10% of the sample")
    return radii


def small_ball_exponent(abs_values, hits=SMALL_BALL_HITS):
    """
    Log-log slope of t -> P(|f| <= t) over [t0, 10 t0], t0 the `hits`-th smallest |f|.

    Returns:
        float | None: The fitted exponent, None when the sample is smaller than `hits`.
    """
    ordered = np.sort(np.asarray(abs_values, dtype=float))
    positive = ordered[ordered > 0]
    if positive.size < hits:
        return None
    start = ordered[hits - 1] if ordered[hits - 1] > 0 else positive[0]
    radii = np.geomspace(start, 10.0 * start, 11)
    mass = np.searchsorted(ordered, radii, side='right') / ordered.size
    return fit_loglog_slope(radii, mass)


def check_carbery_wright(measure, f, t_grid, n, seed, samples=None):
    """
    Small-ball check: mu(|f| <= t) * (mean |f|)^(1/d) against d * t^(1/d).

    Args:
        measure (LogConcaveMeasure): The measure.
        f (Polynomial): A non-constant polynomial of degree d.
        t_grid (sequence[float] | None): Positive radii; None selects the
            0.1% .. 10% quantiles of |f|.
        n (int): Sample size.
        seed (int): Experiment seed.
        samples (SampleSet, optional): Shared sample set.

    Returns:
        list[CheckReport]: One "carbery-wright" report per radius; each
        carries the fitted small-ball exponent in its details.

    Raises:
        NoSmallBallHitsError: No sample value lies below the largest radius.
    """
    _check_dims(measure, f)
    if f.is_constant:
        raise PreconditionError("the small-ball check needs a non-constant polynomial")
    d = f.degree
    samples = _samples(measure, n, seed, samples)
    values = np.abs(push(samples, f).values)
    if t_grid is None:
        t_grid = quantile_t_grid(values)
    t_grid = np.asarray(t_grid, dtype=float).ravel()
    if t_grid.size == 0 or np.any(~(t_grid > 0)):
        raise PreconditionError("small-ball radii must be positive")
    ordered = np.sort(values)
    if np.searchsorted(ordered, t_grid.max(), side='right') == 0:
        raise NoSmallBallHitsError(f"no sample hits |f| <= {t_grid.max():.6g}")
    weight = float(values.mean()) ** (1.0 / d)
    exponent = small_ball_exponent(ordered)
    reports = []
    for t in t_grid:
        hits = int(np.searchsorted(ordered, t, side='right'))
        mass = hits / ordered.size
        rhs_core = d * t ** (1.0 / d)
        stderr = math.sqrt(mass * (1.0 - mass) / ordered.size) * weight / rhs_core
        reports.append(_emit(CheckReport(
            'carbery-wright', mass * weight, rhs_core, stderr,
            config=_config(measure, samples.size, seed, f=f, t=float(t)),
            details={'d': d, 't': float(t), 'hits': hits, 'exponent': exponent},
        )))
    return reports


def check_moment_equivalence(measure, f, q, n, seed, samples=None):
    """
    ||f||_q / ||f||_0 against (q d)^d and ||f||_q / ||f||_1 against q^d.

    Both reports carry the verdict of the norm chain
    ||f||_0 <= ||f||_1 <= ||f||_2 on the empirical measure.

    Returns:
        tuple[CheckReport, CheckReport]: "moments-l0" and "moments-l1".
    """
    _check_dims(measure, f)
    if not q >= 1:
        raise PreconditionError(f"moment order q must be >= 1, got {q}")
    d = f.degree
    samples = _samples(measure, n, seed, samples)
    pf = push(samples, f)
    norms = {r: moment_norm(pf, r) for r in (0, 1, 2)}
    norm_q = moment_norm(pf, q)
    chain = (norms[0] <= norms[1] * (1.0 + NORM_CHAIN_TOL)
             and norms[1] <= norms[2] * (1.0 + NORM_CHAIN_TOL))
    if not chain:
        logger.error("norm chain violated for %s: %r", format_polynomial(f), norms)
    details = {'d': d, 'q': q, 'norm_0': norms[0], 'norm_1': norms[1], 'norm_2': norms[2],
               'norm_q': norm_q, 'norm_chain': chain}
    config = _config(measure, samples.size, seed, f=f, q=q)
    reports = []
    for name, base, rhs_core in (('moments-l0', 0, (q * d) ** d), ('moments-l1', 1, q ** d)):
        stderr = batch_stderr(lambda v, base=base: ratio_of(_norm(v, q), _norm(v, base)), pf.values)
        reports.append(_emit(CheckReport(
            name, ratio_of(norm_q, norms[base]), rhs_core, stderr / rhs_core,
            config=config, details=details, passed=chain,
        )))
    return tuple(reports)


def _quad(function, lo, center, hi):
    total = 0.0
    with warnings.catch_warnings(record=True) as caught:
        warnings.simplefilter('always', integrate.IntegrationWarning)
        for a, b in ((lo, center), (center, hi)):
            if a < b:
                total += integrate.quad(function, a, b, epsabs=1e-13, epsrel=1e-12, limit=400)[0]
    for warning in caught:
        logger.warning("density variance quadrature: %s", warning.message)
    if not math.isfinite(total):
        raise QuadratureError("density variance quadrature returned a non-finite value")
    return total


def check_density_variance(measure):
    """
    (max rho)^2 * Var(mu) against 1/12 for a one-dimensional measure.

    The inequality is sharp on uniform laws and holds for every
    log-concave density, so `passed` is a hard verdict.

    Returns:
        CheckReport: "density-variance" with passed = lhs >= 1/12 - 1e-9.
    """
    if measure.dim != 1:
        raise PreconditionError(f"density variance is a one-dimensional check, got dim {measure.dim}")
    measure = measure.normalized()
    lower, upper = measure.support_bounds()
    lo, hi = float(lower[0]), float(upper[0])
    center = float(measure.center()[0])

    def rho(t):
        return measure.density([t])

    mass = _quad(rho, lo, center, hi)
    if not mass > 0:
        raise QuadratureError("density integrates to zero")
    mean = _quad(lambda t: t * rho(t), lo, center, hi) / mass
    variance = _quad(lambda t: (t - mean) ** 2 * rho(t), lo, center, hi) / mass
    peak = fiber_max(measure, measure.center(), np.ones(1)) / mass
    lhs = peak * peak * variance
    passed = lhs >= DENSITY_VARIANCE_BOUND - DENSITY_VARIANCE_TOL
    if not passed:
        logger.error("density variance below 1/12 for %s: %.15g", measure.family, lhs)
    return _emit(CheckReport(
        'density-variance', lhs, DENSITY_VARIANCE_BOUND,
        config={'measure': measure.descriptor()},
        details={'max_density': peak, 'variance': variance, 'mass': mass},
        passed=passed,
    ))


def check_reverse_poincare(measure, f, e, n, seed, samples=None):
    """
    ||d_e f||_2 against ||D_e mu||_TV * ||f||_2.

    Returns:
        CheckReport: "reverse-poincare"; norms by Monte Carlo, the
        Skorohod norm by quadrature.
    """
    _check_dims(measure, f)
    if e.dim != measure.dim:
        raise DimensionMismatchError(measure.dim, e.dim, what='direction')
    variation = skorohod_tv(measure, e)
    samples = _samples(measure, n, seed, samples)
    pf = push(samples, f)
    derivative = push(samples, directional_derivative(f, e))
    lhs = moment_norm(derivative, 2)
    norm_f = moment_norm(pf, 2)
    rhs_core = variation * norm_f
    stderr = batch_stderr(lambda a, b: ratio_of(_norm(a, 2), variation * _norm(b, 2)),
                          derivative.values, pf.values)
    return _emit(CheckReport(
        'reverse-poincare', lhs, rhs_core, stderr,
        config=_config(measure, samples.size, seed, f=f, e=e),
        details={'skorohod_tv': variation, 'norm_derivative': lhs, 'norm_f': norm_f},
    ))


def check_poincare(measure, f, n, seed, samples=None):
    """
    Var(f) against E|x - mean|^2 * E|grad f|^2; the ratio is 0 for constant f.
    """
    _check_dims(measure, f)
    samples = _samples(measure, n, seed, samples)
    points = samples.points
    spread = float(np.sum(np.var(points, axis=0, ddof=1)))
    if f.is_constant:
        lhs, energy = 0.0, 0.0
    else:
        lhs = float(np.var(evaluate_many(f, points), ddof=1))
        energy = float(np.mean(sum(evaluate_many(p, points) ** 2 for p in gradient(f))))
    return _emit(CheckReport(
        'poincare', lhs, spread * energy,
        config=_config(measure, samples.size, seed, f=f),
        details={'spread': spread, 'gradient_energy': energy},
    ))


def check_fractional_bound(measure, f, g, n, seed, bins='auto', samples=None):
    """
    E|g - E g|^(1/d) * TV(mu o f^-1, mu o g^-1) against E|f - g|^(1/d).
    """
    _check_dims(measure, f, g)
    d = max(f.degree, g.degree)
    if d < 1:
        raise PreconditionError("the fractional bound needs a non-constant polynomial")
    samples = _samples(measure, n, seed, samples)
    pf, pg = push(samples, f), push(samples, g)
    estimate = tv_histogram(pf, pg, bins=bins, seed=seed)
    weight = float(np.mean(np.abs(pg.values - pg.values.mean()) ** (1.0 / d)))
    rhs_core = float(np.mean(np.abs(pf.values - pg.values) ** (1.0 / d)))
    stderr = weight * estimate.bootstrap_stderr / rhs_core if rhs_core > 0 else 0.0
    return _emit(CheckReport(
        'fractional-bound', weight * estimate.value, rhs_core, stderr,
        config=_config(measure, samples.size, seed, f=f, g=g, bins=bins),
        details={'d': d, 'tv': estimate.value, 'bins': estimate.bins, 'centered_moment': weight},
    ))


def check_directional_bound(measure, f, g, e, n, seed, bins='auto', samples=None):
    """
    ||d_e g||_2^(1/d) * TV against ||f - g||_1^(1/d) in isotropic position.

    The sample is whitened by `isotropize`; f and g are carried along so
    that their laws, and hence the TV term, are unchanged.
    """
    _check_dims(measure, f, g)
    if e.dim != measure.dim:
        raise DimensionMismatchError(measure.dim, e.dim, what='direction')
    d = max(f.degree, g.degree)
    if d < 1:
        raise PreconditionError("the directional bound needs a non-constant polynomial")
    samples = _samples(measure, n, seed, samples)
    transform = isotropize(samples)
    image = SampleSet(transform(samples.points), samples.seed, samples.method,
                      {'isotropic_image_of': samples.descriptor})
    f_iso, g_iso = transform.transport(f), transform.transport(g)
    pf, pg = push(image, f_iso), push(image, g_iso)
    estimate = tv_histogram(pf, pg, bins=bins, seed=seed)
    derivative = moment_norm(push(image, directional_derivative(g_iso, e)), 2)
    distance = _norm(pf.values - pg.values, 1)
    weight = derivative ** (1.0 / d)
    rhs_core = distance ** (1.0 / d)
    stderr = weight * estimate.bootstrap_stderr / rhs_core if rhs_core > 0 else 0.0
    return _emit(CheckReport(
        'directional-bound', weight * estimate.value, rhs_core, stderr,
        config=_config(measure, samples.size, seed, f=f, g=g, e=e, bins=bins),
        details={'d': d, 'tv': estimate.value, 'bins': estimate.bins,
                 'norm_derivative': derivative, 'l1_distance': distance},
    ))


def epsilon_split(measure, f, g, e, eps_grid, n, seed, samples=None):
    """
    Splits the mean of tanh(f) - tanh(g) along d_e g and profiles the two-term bound.

    With phi = tanh and Phi = log cosh (so Phi' = phi), for every eps > 0

        E[phi(f) - phi(g)] = E[d_e g * d_e(Phi(f) - Phi(g)) / ((d_e g)^2 + eps)]
                             - E[d_e g * (d_e f - d_e g) * phi(f) / ((d_e g)^2 + eps)]
                             + eps * E[(phi(f) - phi(g)) / ((d_e g)^2 + eps)],

    which holds pointwise and therefore exactly on the sample up to
    rounding. The bound profile A(eps) + B(eps) is balanced at eps_star,
    where it equals 2 ||d_e g||_2^(-1/d) ||f - g||_1^(1/d).

    Args:
        measure (LogConcaveMeasure): The measure.
        f (Polynomial): Perturbed polynomial.
        g (Polynomial): Reference polynomial with d_e g not identically zero.
        e (Direction): Splitting direction.
        eps_grid (sequence[float]): Positive epsilons.
        n (int): Sample size.
        seed (int): Experiment seed.
        samples (SampleSet, optional): Shared sample set.

    Returns:
        EpsilonSplitReport: Parts, profiles and the balancing epsilon.
    """
    _check_dims(measure, f, g)
    if e.dim != measure.dim:
        raise DimensionMismatchError(measure.dim, e.dim, what='direction')
    d = max(f.degree, g.degree)
    if d < 2:
        raise PreconditionError(f"epsilon splitting needs degree >= 2, got {d}")
    eps = np.asarray(eps_grid, dtype=float).ravel()
    if eps.size == 0 or np.any(~(eps > 0)):
        raise PreconditionError("epsilons must be positive")
    samples = _samples(measure, n, seed, samples)
    points = samples.points
    fv, gv = evaluate_many(f, points), evaluate_many(g, points)
    dfv = evaluate_many(directional_derivative(f, e), points)
    dgv = evaluate_many(directional_derivative(g, e), points)
    norm_dg = float(np.sqrt(np.mean(dgv * dgv)))
    if norm_dg == 0.0:
        raise PreconditionError("d_e g vanishes on the sample")
    phi_f, phi_g = np.tanh(fv), np.tanh(gv)
    lhs = float(np.mean(phi_f - phi_g))
    distance = float(np.mean(np.abs(fv - gv)))

    parts = []
    for value in eps:
        denominator = dgv * dgv + value
        derivative_term = float(np.mean(dgv * (phi_f * dfv - phi_g * dgv) / denominator))
        cross_term = -float(np.mean(dgv * (dfv - dgv) * phi_f / denominator))
        eps_term = value * float(np.mean((phi_f - phi_g) / denominator))
        parts.append((derivative_term, cross_term, eps_term))
    residual = max(abs(math.fsum(p) - lhs) for p in parts)

    a_profile = norm_dg ** (-1.0 / (d - 1)) * eps ** (1.0 / (2 * d - 2))
    b_profile = eps ** -0.5 * distance
    eps_star = (norm_dg ** (1.0 / (d - 1)) * distance) ** ((2.0 * d - 2.0) / d)
    bound = 2.0 * norm_dg ** (-1.0 / d) * distance ** (1.0 / d)
    minimizer = float(eps[int(np.argmin(a_profile + b_profile))])
    report = EpsilonSplitReport(
        lhs=lhs, eps=tuple(float(v) for v in eps), parts=tuple(parts), split_residual=residual,
        a_profile=tuple(float(v) for v in a_profile), b_profile=tuple(float(v) for v in b_profile),
        eps_star=eps_star, bound_at_eps_star=bound, grid_minimizer=minimizer,
        config=_config(measure, samples.size, seed, f=f, g=g, e=e, eps=eps),
    )
    report_ready.send(sender=report.name, report=report)
    return report
