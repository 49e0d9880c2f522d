"""
Execution of experiment suites.

run(config) dispatches on config.suite and returns a RunResult: the
reports, a summary, the rows of the suite's CSV and the plottable
series. Nothing here writes files; see artifacts.write_artifacts.
"""
import logging
import math
from dataclasses import dataclass, field

from check_app.api.serializers import ConstantEstimateSerializer
from check_app.calibration import DEFAULT_MEASURES, EnsembleSpec, estimate_constant, small_ball_ensemble
from check_app.checkers import (
    check_carbery_wright,
    check_density_variance,
    check_directional_bound,
    check_fractional_bound,
    check_main_bound,
    check_moment_equivalence,
    check_poincare,
    check_reverse_poincare,
    epsilon_split,
)
from check_app.reports import CheckReport, ratio_of
from core.exceptions import PreconditionError
from measure_app.measures import from_descriptor, product_exponential, standard_gaussian, uniform_box
from measure_app.sampling import sample
from poly_app.parser import parse
from poly_app.polynomial import Direction
from pushforward_app.api.serializers import SweepRowSerializer
from pushforward_app.pushforward import mean_and_variance, moment_norm, push
from pushforward_app.tv import fit_loglog_slope, shift_family_tv

from . import svg

logger = logging.getLogger(__name__)

REPORT_HEADER = ('name', 'lhs', 'rhs_core', 'ratio', 'stderr', 'passed')
SWEEP_HEADER = ('delta', 'tv', 'stderr', 'bins')
ESTIMATE_HEADER = ('cell', 'ratio', 'running_max')


@dataclass
class RunResult:
    """
    Outcome of one suite.

    Attributes:
        suite (str): The suite that ran.
        config (dict): Config echo.
        reports (list): CheckReport and EpsilonSplitReport objects in run order.
        summary (dict): Suite-level results (slopes, c_hat, failure counts).
        header (tuple[str, ...]): CSV columns.
        rows (list[tuple]): CSV rows.
        plots (dict[str, PlotSeries]): Series for optional SVG output.
    """
    suite: str
    config: dict
    reports: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    header: tuple = ()
    rows: list = field(default_factory=list)
    plots: dict = field(default_factory=dict)

    @property
    def failed(self):
        """True when a check that must hold as stated did not."""
        return any(getattr(report, 'failed', False) for report in self.reports)


def report_row(report):
    if isinstance(report, CheckReport):
        passed = '' if report.passed is None else str(report.passed).lower()
        return (report.name, report.lhs, report.rhs_core, report.ratio, report.stderr, passed)
    return (report.name, report.lhs, report.bound_at_eps_star, report.ratio, '', '')


def _report_summary(reports):
    finite = [r.ratio for r in reports if math.isfinite(r.ratio)]
    return {
        'reports': len(reports),
        'failed': sum(1 for r in reports if getattr(r, 'failed', False)),
        'max_ratio': max(finite) if finite else None,
    }


def _ratio_plot(reports):
    return svg.histogram([r.ratio for r in reports], title='checker ratios', x_label='ratio', y_label='count')


def _pushforward_plot(samples, polynomial, name):
    return svg.histogram(push(samples, polynomial).values, title=f'law of {name}',
                         x_label=name, y_label='count')


def _direction(config, dim):
    if config.e is None:
        return Direction.axis(dim, 1)
    return Direction.from_vector(config.e)


def run_check(config):
    """Runs one checker suite on the configured measure and polynomials."""
    measure = from_descriptor(config.measure)
    if config.suite == 'density-variance':
        reports = [check_density_variance(measure)]
        return RunResult(config.suite, config.echo(), reports, _report_summary(reports),
                         REPORT_HEADER, [report_row(r) for r in reports], {'ratios': _ratio_plot(reports)})

    polynomials = {name: parse(getattr(config, name), measure.dim)
                   for name in ('f', 'g') if getattr(config, name) is not None}
    f, g = polynomials.get('f'), polynomials.get('g')
    plots = {}
    summary = {}
    if config.suite == 'carbery-wright' and f is None:
        cells = small_ball_ensemble(config.degree, cells=config.trials, n=config.n, seed=config.seed,
                                    coefficient_scale=config.coefficient_scale)
        reports = [report for cell_reports, _ in cells for report in cell_reports]
        exponents = [exponent for _, exponent in cells if exponent is not None]
        summary['exponents'] = [exponent for _, exponent in cells]
        summary['min_exponent'] = min(exponents) if exponents else None
    else:
        samples = sample(measure, config.n, config.seed)
        n, seed, bins = config.n, config.seed, config.bins
        if config.suite == 'main-bound':
            reports = [check_main_bound(measure, f, g, n, seed, bins=bins, samples=samples)]
        elif config.suite == 'fractional-bound':
            reports = [check_fractional_bound(measure, f, g, n, seed, bins=bins, samples=samples)]
        elif config.suite == 'directional-bound':
            e = _direction(config, measure.dim)
            reports = [check_directional_bound(measure, f, g, e, n, seed, bins=bins, samples=samples)]
        elif config.suite == 'epsilon-split':
            e = _direction(config, measure.dim)
            reports = [epsilon_split(measure, f, g, e, config.eps, n, seed, samples=samples)]
        elif config.suite == 'moments':
            reports = list(check_moment_equivalence(measure, f, config.q, n, seed, samples=samples))
        elif config.suite == 'reverse-poincare':
            e = _direction(config, measure.dim)
            reports = [check_reverse_poincare(measure, f, e, n, seed, samples=samples)]
        elif config.suite == 'poincare':
            reports = [check_poincare(measure, f, n, seed, samples=samples)]
        elif config.suite == 'carbery-wright':
            reports = check_carbery_wright(measure, f, config.t, n, seed, samples=samples)
            summary['exponent'] = reports[0].details['exponent']
        else:
            raise PreconditionError(f"unknown check suite {config.suite!r}")
        plots['pushforward'] = _pushforward_plot(samples, f, 'f')
    plots['ratios'] = _ratio_plot(reports)
    return RunResult(config.suite, config.echo(), reports, {**_report_summary(reports), **summary},
                     REPORT_HEADER, [report_row(r) for r in reports], plots)


def run_sweep(config):
    """
    TV between the laws of g and g + delta h over the delta grid.

    The summary holds the fitted log-log slope and the weighted ratios
    sigma_g^(1/d) TV / (delta ||h||_2)^(1/d) with d = max(deg g, deg h, 1).
    """
    measure = from_descriptor(config.measure)
    g, h = parse(config.g, measure.dim), parse(config.h, measure.dim)
    samples = sample(measure, config.n, config.seed)
    estimates = shift_family_tv(measure, g, h, config.deltas, config.n, config.seed, bins=config.bins,
                                samples=samples)
    _, variance = mean_and_variance(push(samples, g))
    sigma = math.sqrt(variance)
    h_norm = moment_norm(push(samples, h), 2)
    d = max(g.degree, h.degree, 1)
    tvs = [estimate.value for estimate in estimates]
    weighted = [ratio_of(sigma ** (1.0 / d) * tv, (delta * h_norm) ** (1.0 / d))
                for delta, tv in zip(config.deltas, tvs)]
    try:
        slope = fit_loglog_slope(config.deltas, tvs)
    except PreconditionError:
        slope = None
    positive = [w for w in weighted if 0 < w < math.inf]
    summary = {
        'd': d,
        'sigma_g': sigma,
        'slope': slope,
        'weighted_ratios': weighted,
        'ratio_spread': max(positive) / min(positive) if positive else None,
    }
    logger.info("sweep over %d deltas: slope %s", len(tvs), slope)
    data = SweepRowSerializer([{'delta': delta, 'estimate': estimate}
                               for delta, estimate in zip(config.deltas, estimates)], many=True).data
    rows = [tuple(row[column] for column in SWEEP_HEADER) for row in data]
    plots = {
        'tv': svg.markers(config.deltas, tvs, title='histogram TV of the shift family',
                          x_label='delta', y_label='TV', log_x=True, log_y=True),
        'pushforward': _pushforward_plot(samples, g, 'g'),
    }
    return RunResult(config.suite, config.echo(), [], summary, SWEEP_HEADER, rows, plots)


def run_estimate_constant(config):
    """Empirical main-bound constant of degree config.degree; one CSV row per cell."""
    measures = (config.measure,) if config.measure is not None else DEFAULT_MEASURES
    spec = EnsembleSpec(measures=measures, trials=config.trials, deltas=config.deltas,
                        coefficient_scale=config.coefficient_scale, g=config.g, h=config.h,
                        bins=config.bins)
    estimate = estimate_constant(config.degree, spec, n=config.n, seed=config.seed)
    rows = [(cell, ratio, running) for cell, (ratio, running)
            in enumerate(zip(estimate.ratios, estimate.stability))]
    cells = range(1, estimate.trials + 1)
    plots = {
        'ratios': svg.histogram(estimate.ratios, title='main-bound ratios', x_label='ratio', y_label='count'),
        'stability': svg.markers(cells, estimate.stability, title='running maximum',
                                 x_label='cell', y_label='C_hat'),
    }
    summary = dict(ConstantEstimateSerializer(estimate).data)
    return RunResult(config.suite, config.echo(), [], summary, ESTIMATE_HEADER, rows, plots)


def run_sample(config):
    """Draws the configured sample set; one CSV row per point."""
    measure = from_descriptor(config.measure)
    samples = sample(measure, config.n, config.seed)
    header = tuple(f'x{i + 1}' for i in range(samples.dim))
    rows = [tuple(float(v) for v in point) for point in samples.points]
    summary = {'id': samples.id, 'size': samples.size, 'method': samples.method.as_dict(),
               'descriptor': samples.descriptor}
    plots = {'x1': svg.histogram(samples.points[:, 0], title='first coordinate', x_label='x1', y_label='count')}
    return RunResult(config.suite, config.echo(), [], summary, header, rows, plots)


def run_all(config):
    """
    A fixed battery of every checker on standard measures and polynomials.

    Uses config.n, config.seed, config.q, config.bins, config.eps and,
    for its main-bound ensemble, config.degree, config.trials and
    config.deltas. The measure and polynomial fields are ignored.
    """
    n, seed, bins = config.n, config.seed, config.bins
    gaussian_1d, gaussian_2d = standard_gaussian(1), standard_gaussian(2)
    reports = [check_density_variance(m)
               for m in (uniform_box([0.0], [1.0]), standard_gaussian(1), product_exponential([1.0]))]

    samples_1d = sample(gaussian_1d, n, seed)
    x1, square = parse('x1', 1), parse('x1^2', 1)
    shifted = parse('x1^2 + 0.01', 1)
    for f in (x1, square):
        reports.extend(check_moment_equivalence(gaussian_1d, f, config.q, n, seed, samples=samples_1d))
    reports.append(check_reverse_poincare(gaussian_1d, x1, Direction.axis(1, 1), n, seed, samples=samples_1d))
    reports.append(check_poincare(gaussian_1d, square, n, seed, samples=samples_1d))
    reports.extend(check_carbery_wright(gaussian_1d, square, None, n, seed, samples=samples_1d))
    reports.append(check_main_bound(gaussian_1d, shifted, square, n, seed, bins=bins, samples=samples_1d))
    reports.append(check_fractional_bound(gaussian_1d, shifted, square, n, seed, bins=bins, samples=samples_1d))

    samples_2d = sample(gaussian_2d, n, seed)
    g = parse('x1^2 + x2', 2)
    f = parse('x1^2 + x2 + 0.1*x1', 2)
    e = Direction.axis(2, 1)
    reports.append(check_directional_bound(gaussian_2d, f, g, e, n, seed, bins=bins, samples=samples_2d))
    reports.append(epsilon_split(gaussian_2d, f, g, e, config.eps, n, seed, samples=samples_2d))

    spec = EnsembleSpec(trials=config.trials, deltas=config.deltas,
                        coefficient_scale=config.coefficient_scale, bins=bins)
    estimate = estimate_constant(config.degree, spec, n=n, seed=seed)

    by_name = {}
    for report in reports:
        if math.isfinite(report.ratio):
            by_name[report.name] = max(by_name.get(report.name, 0.0), report.ratio)
    summary = {**_report_summary(reports), 'max_ratio_by_check': by_name,
               'c_hat': estimate.c_hat, 'estimate_trials': estimate.trials}
    plots = {'ratios': _ratio_plot(reports)}
    return RunResult(config.suite, config.echo(), reports, summary,
                     REPORT_HEADER, [report_row(r) for r in reports], plots)


RUNNERS = {
    'sweep': run_sweep,
    'estimate-constant': run_estimate_constant,
    'sample': run_sample,
    'all': run_all,
}


def run(config):
    """
    Runs the suite named by config.suite.

    Args:
        config (ExperimentConfig): A validated configuration.

    Returns:
        RunResult: Reports, summary, CSV rows and plots of the run.
    """
    logger.info("running suite %s (n=%d, seed=%d)", config.suite, config.n, config.seed)
    return RUNNERS.get(config.suite, run_check)(config)
