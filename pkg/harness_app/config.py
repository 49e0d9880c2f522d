"""
Experiment configuration of the lcpoly harness.

A configuration is a flat JSON object with a "suite" discriminator.
Command-line flags override fields of the file; the merged object is
validated by ExperimentConfigSerializer and frozen into an
ExperimentConfig, whose echo is embedded in every artifact.
"""
import json
import math
import re
from dataclasses import asdict, dataclass

import numpy as np

from core.exceptions import ConfigurationError, PreconditionError

CHECK_SUITES = (
    'main-bound',
    'carbery-wright',
    'moments',
    'reverse-poincare',
    'poincare',
    'density-variance',
    'fractional-bound',
    'directional-bound',
    'epsilon-split',
)
SUITES = CHECK_SUITES + ('sweep', 'estimate-constant', 'sample', 'all')

DEFAULT_DELTA_GRID = '1e-3:1e-1:10log'
DEFAULT_EPS_GRID = '1e-6:1:13log'

_GRID = re.compile(r'^\s*([^:]+):([^:]+):(\d+)(log|lin)\s*$')


def parse_grid(value):
    """
    Parses a grid given as `a:b:Nlog`, `a:b:Nlin`, a comma list or a list of numbers.

    Args:
        value (str | list): The grid text or its values.

    Returns:
        tuple[float, ...]: The grid points in the given order.

    Raises:
        PreconditionError: Malformed text, non-finite points, or a log
            grid with a non-positive end point.
    """
    if isinstance(value, (list, tuple)):
        points = [float(v) for v in value]
    else:
        match = _GRID.match(str(value))
        if match:
            start, stop, count = float(match[1]), float(match[2]), int(match[3])
            if count < 1:
                raise PreconditionError(f"grid {value!r} needs at least one point")
            if match[4] == 'log':
                if start <= 0 or stop <= 0:
                    raise PreconditionError(f"log grid {value!r} needs positive end points")
                points = np.geomspace(start, stop, count)
            else:
                points = np.linspace(start, stop, count)
        else:
            try:
                points = [float(v) for v in str(value).split(',') if v.strip()]
            except ValueError as exc:
                raise PreconditionError(f"cannot parse grid {value!r}") from exc
    points = tuple(float(v) for v in points)
    if not points or not all(math.isfinite(v) for v in points):
        raise PreconditionError(f"grid {value!r} is empty or not finite")
    return points


@dataclass(frozen=True)
class ExperimentConfig:
    """
    Validated experiment configuration.

    Attributes:
        suite (str): One of SUITES.
        measure (dict | None): Validated measure descriptor; None lets
            'estimate-constant' and 'all' use their built-in measures.
        f, g, h (str | None): Polynomial texts.
        e (tuple[float, ...] | None): Direction vector; the first axis when omitted.
        q (float): Moment order of the moments suite.
        t (tuple[float, ...] | None): Small-ball radii; quantile grid when omitted.
        deltas (tuple[float, ...]): Shift sizes of sweeps and ensembles.
        eps (tuple[float, ...]): Epsilon grid of the epsilon-split suite.
        n (int): Sample size.
        seed (int): Experiment seed.
        bins (int | str): Bin rule of TV estimates.
        degree (int): Degree of random ensemble polynomials.
        trials (int): Ensemble cells.
        coefficient_scale (float): Range of random coefficients.
        output (str | None): Artifact directory; LCPOLY_OUTPUT_DIR when omitted.
        svg (bool): Also write SVG plots.
    """
    suite: str
    measure: dict = None
    f: str = None
    g: str = None
    h: str = None
    e: tuple = None
    q: float = 2.0
    t: tuple = None
    deltas: tuple = parse_grid(DEFAULT_DELTA_GRID)
    eps: tuple = parse_grid(DEFAULT_EPS_GRID)
    n: int = 100_000
    seed: int = 0
    bins: object = 'auto'
    degree: int = 2
    trials: int = 200
    coefficient_scale: float = 1.0
    output: str = None
    svg: bool = False

    def echo(self):
        """The configuration as embedded in artifacts; the output path is left out."""
        data = asdict(self)
        data.pop('output')
        for name in ('e', 't', 'deltas', 'eps'):
            if data[name] is not None:
                data[name] = list(data[name])
        return data


def load_config(path=None, **overrides):
    """
    Reads a configuration file, applies overrides and validates the result.

    Args:
        path (str | Path, optional): Flat JSON config file.
        **overrides: Field values that replace those of the file; None
            values are ignored.

    Returns:
        ExperimentConfig: The validated configuration.

    Raises:
        OSError: The file cannot be read.
        ConfigurationError: The file is not a JSON object or a field is invalid.
    """
    from .api.serializers import ExperimentConfigSerializer

    data = {}
    if path is not None:
        with open(path, encoding='utf-8') as handle:
            try:
                data = json.load(handle)
            except json.JSONDecodeError as exc:
                raise ConfigurationError({'config': [f'Invalid JSON: {exc}']}) from exc
        if not isinstance(data, dict):
            raise ConfigurationError({'config': ['Expected a JSON object.']})
    data.update({name: value for name, value in overrides.items() if value is not None})
    serializer = ExperimentConfigSerializer(data=data)
    if not serializer.is_valid():
        raise ConfigurationError(serializer.errors)
    return ExperimentConfig(**serializer.validated_data)
