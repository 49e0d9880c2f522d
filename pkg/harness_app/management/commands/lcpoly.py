"""
The lcpoly management command.

    manage.py lcpoly check <suite> [flags]
    manage.py lcpoly sweep [flags]
    manage.py lcpoly estimate-constant [flags]
    manage.py lcpoly sample [flags]

Exit codes: 0 ok, 2 a check that must hold as stated failed, 64 usage or
configuration error, 74 I/O error.
"""
import sys

from django.conf import settings
from django.core.management.base import BaseCommand, CommandError, CommandParser

from core.exceptions import ConfigurationError, LcpolyError
from harness_app.artifacts import write_artifacts
from harness_app.config import CHECK_SUITES, load_config
from harness_app.runner import run

EX_CHECK_FAILED = 2
EX_USAGE = 64
EX_IOERR = 74


class HarnessParser(CommandParser):
    """Reports usage errors with exit code 64 instead of argparse's 2."""

    def error(self, message):
        raise CommandError(f"usage: {message}", returncode=EX_USAGE)


def add_experiment_arguments(parser):
    parser.add_argument('--config', help='Flat JSON config file; flags override its fields.')
    parser.add_argument('--family', '--measure', dest='family',
                        help='Measure family, e.g. gaussian, uniform-box, product-exponential.')
    parser.add_argument('--dim', type=int)
    parser.add_argument('--lo', '--lower', dest='lower', help='Lower box bounds, one value or a comma list.')
    parser.add_argument('--hi', '--upper', dest='upper', help='Upper box bounds, one value or a comma list.')
    parser.add_argument('--rates', help='Exponential rates, one value or a comma list.')
    parser.add_argument('--radius', type=float)
    parser.add_argument('--potential', help='Registered convex potential of general_potential.')
    parser.add_argument('--f', help='Polynomial f, e.g. "x1^2 + 0.01".')
    parser.add_argument('--g', help='Polynomial g.')
    parser.add_argument('--h', help='Shift direction h of sweeps.')
    parser.add_argument('--e', help='Direction vector as a comma list.')
    parser.add_argument('--q', type=float, help='Moment order.')
    parser.add_argument('--t', help='Small-ball radii: a:b:Nlog, a:b:Nlin or a comma list.')
    parser.add_argument('--deltas', help='Shift sizes: a:b:Nlog, a:b:Nlin or a comma list.')
    parser.add_argument('--eps', help='Epsilon grid of the epsilon-split suite.')
    parser.add_argument('--n', type=int, help='Sample size.')
    parser.add_argument('--seed', type=int)
    parser.add_argument('--bins', help='Bin count, "auto" or "sqrt".')
    parser.add_argument('--degree', '--d', dest='degree', type=int, help='Degree of random polynomials.')
    parser.add_argument('--trials', type=int, help='Ensemble cells.')
    parser.add_argument('--coefficient-scale', dest='coefficient_scale', type=float)
    parser.add_argument('--output', help='Artifact directory (default LCPOLY_OUTPUT_DIR).')
    parser.add_argument('--svg', action='store_true', default=None, help='Also write SVG plots.')


class Command(BaseCommand):
    help = 'Runs lcpoly experiments and writes report JSON, CSV and SVG artifacts.'

    def create_parser(self, prog_name, subcommand, **kwargs):
        parser = super().create_parser(prog_name, subcommand, **kwargs)
        parser.__class__ = HarnessParser
        return parser

    def add_arguments(self, parser):
        subparsers = parser.add_subparsers(dest='command', required=True, parser_class=HarnessParser)
        check = subparsers.add_parser('check', help='Run one checker suite, or all of them.')
        check.add_argument('suite', choices=CHECK_SUITES + ('all',))
        add_experiment_arguments(check)
        for name, text in (('sweep', 'TV of a shift family over a delta grid.'),
                           ('estimate-constant', 'Empirical main-bound constant over an ensemble.'),
                           ('sample', 'Dump a sample set to CSV.')):
            add_experiment_arguments(subparsers.add_parser(name, help=text))

    def run_from_argv(self, argv):
        try:
            super().run_from_argv(argv)
        except CommandError as exc:
            # parse errors are raised before BaseCommand maps CommandError to an exit code
            self.stderr.write(f"CommandError: {exc}")
            sys.exit(exc.returncode)

    def handle(self, *args, **options):
        command = options['command']
        suite = options['suite'] if command == 'check' else command
        overrides = {name: options.get(name) for name in (
            'family', 'dim', 'lower', 'upper', 'rates', 'radius', 'potential', 'f', 'g', 'h', 'e',
            'q', 't', 'deltas', 'eps', 'n', 'seed', 'bins', 'degree', 'trials', 'coefficient_scale',
            'output', 'svg')}
        try:
            config = load_config(options.get('config'), suite=suite, **overrides)
        except OSError as exc:
            raise CommandError(f"cannot read config: {exc}", returncode=EX_IOERR)
        except ConfigurationError as exc:
            raise CommandError(str(exc), returncode=EX_USAGE)

        try:
            result = run(config)
        except LcpolyError as exc:
            raise CommandError(f"{suite}: {exc}", returncode=EX_USAGE)

        try:
            paths = write_artifacts(result, config.output or settings.LCPOLY_OUTPUT_DIR, svg=config.svg)
        except OSError as exc:
            raise CommandError(f"cannot write artifacts: {exc}", returncode=EX_IOERR)
        for path in paths:
            self.stdout.write(str(path))

        if result.failed:
            failed = sorted({report.name for report in result.reports if getattr(report, 'failed', False)})
            raise CommandError(f"checks failed: {', '.join(failed)}", returncode=EX_CHECK_FAILED)
        self.stdout.write(self.style.SUCCESS(f"{suite}: done"))
