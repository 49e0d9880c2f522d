"""
Standalone SVG plots of sweeps, histograms and ratio series.

Plots are rendered through the Django template harness_app/plot.svg on a
fixed 800 x 500 viewport. Coordinates are formatted to two decimals so
identical input gives identical bytes.
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np
from django.template.loader import render_to_string

from core.exceptions import EmptySeriesError

logger = logging.getLogger(__name__)

WIDTH, HEIGHT = 800, 500
LEFT, RIGHT, TOP, BOTTOM = 80, 30, 50, 60
LINEAR_TICKS = 5
HISTOGRAM_BINS = 30


@dataclass(frozen=True)
class PlotSeries:
    """
    Data of one plot.

    Attributes:
        kind (str): 'markers' for (x, y) points, 'bars' for a histogram.
        points (tuple[tuple[float, float], ...]): Marker positions, or bar
            centers and heights.
        title (str): Plot title.
        x_label (str): Label of the horizontal axis.
        y_label (str): Label of the vertical axis.
        log_x (bool): Logarithmic horizontal axis.
        log_y (bool): Logarithmic vertical axis.
        width (float): Bar width in data units; bars only.
    """
    kind: str
    points: tuple
    title: str = ''
    x_label: str = 'x'
    y_label: str = 'y'
    log_x: bool = False
    log_y: bool = False
    width: float = 0.0


def markers(xs, ys, **labels):
    return PlotSeries('markers', tuple((float(x), float(y)) for x, y in zip(xs, ys)), **labels)


def histogram(values, bins=HISTOGRAM_BINS, **labels):
    """Bars of an equal-width histogram of the finite values."""
    values = np.asarray(values, dtype=float)
    values = values[np.isfinite(values)]
    if values.size == 0:
        return PlotSeries('bars', (), **labels)
    counts, edges = np.histogram(values, bins=bins)
    centers = 0.5 * (edges[:-1] + edges[1:])
    return PlotSeries('bars', tuple((float(c), float(k)) for c, k in zip(centers, counts)),
                      width=float(edges[1] - edges[0]), **labels)


class _Axis:
    def __init__(self, values, log, start, stop):
        values = np.asarray(values, dtype=float)
        self.log = log
        if log:
            values = np.log10(values)
        low, high = float(values.min()), float(values.max())
        if high - low <= 0:
            pad = 0.5 if log else max(0.5, abs(low) * 0.1)
            low, high = low - pad, high + pad
        self.low, self.high = low, high
        self.start, self.stop = start, stop

    def position(self, value):
        if self.log:
            value = math.log10(value)
        return self.start + (value - self.low) / (self.high - self.low) * (self.stop - self.start)

    def ticks(self):
        if self.log:
            decades = range(math.ceil(self.low), math.floor(self.high) + 1)
            values = [10.0 ** k for k in decades] or [10.0 ** self.low, 10.0 ** self.high]
        else:
            values = list(np.linspace(self.low, self.high, LINEAR_TICKS))
        return [(f'{self.position(v):.2f}', f'{v:.3g}') for v in values]


def render_svg(series, metadata=None):
    """
    Renders a plot to SVG text.

    Args:
        series (PlotSeries): The data; points with non-positive coordinates
            on a logarithmic axis are skipped.
        metadata (dict, optional): Embedded as JSON in the <metadata> element.

    Returns:
        str: The SVG document.

    Raises:
        EmptySeriesError: No plottable point.
    """
    points = [(x, y) for x, y in series.points
              if math.isfinite(x) and math.isfinite(y)
              and (x > 0 or not series.log_x) and (y > 0 or not series.log_y)]
    if not points:
        raise EmptySeriesError("cannot plot an empty series")
    xs, ys = [p[0] for p in points], [p[1] for p in points]
    if series.kind == 'bars':
        half = series.width / 2.0
        xs = xs + [x - half for x in xs] + [x + half for x in xs]
        if not series.log_y:
            ys = ys + [0.0]
    x_axis = _Axis(xs, series.log_x, LEFT, WIDTH - RIGHT)
    y_axis = _Axis(ys, series.log_y, HEIGHT - BOTTOM, TOP)

    context = {
        'width': WIDTH,
        'height': HEIGHT,
        'left': LEFT,
        'right': WIDTH - RIGHT,
        'top': TOP,
        'bottom': HEIGHT - BOTTOM,
        'center_x': (LEFT + WIDTH - RIGHT) // 2,
        'center_y': (TOP + HEIGHT - BOTTOM) // 2,
        'title': series.title,
        'x_label': series.x_label,
        'y_label': series.y_label,
        'x_scale': 'log' if series.log_x else 'linear',
        'y_scale': 'log' if series.log_y else 'linear',
        'x_ticks': x_axis.ticks(),
        'y_ticks': y_axis.ticks(),
        'metadata': json.dumps(metadata or {}, sort_keys=True),
    }
    if series.kind == 'bars':
        base = HEIGHT - BOTTOM if series.log_y else y_axis.position(0.0)
        context['bars'] = [
            (f'{x_axis.position(x - series.width / 2.0):.2f}', f'{y_axis.position(y):.2f}',
             f'{x_axis.position(x + series.width / 2.0) - x_axis.position(x - series.width / 2.0):.2f}',
             f'{base - y_axis.position(y):.2f}')
            for x, y in points
        ]
    else:
        context['markers'] = [(f'{x_axis.position(x):.2f}', f'{y_axis.position(y):.2f}') for x, y in points]
        context['polyline'] = ' '.join(f'{cx},{cy}' for cx, cy in context['markers'])
    return render_to_string('harness_app/plot.svg', context)


def emit_svg(series, path, metadata=None):
    """
    Writes a plot to path.

    Returns:
        Path: The written file.

    Raises:
        EmptySeriesError: No plottable point.
        OSError: The file cannot be written.
    """
    document = render_svg(series, metadata)
    path = Path(path)
    path.write_text(document, encoding='utf-8')
    logger.info("wrote %s", path)
    return path
