"""
Report JSON, CSV and SVG artifacts of a harness run.

Every artifact carries format_version and the config echo. JSON is
written with sorted keys; CSV starts with a `# lcpoly ...` comment line.
Artifacts hold no timestamps, so equal runs produce equal bytes.
"""
import csv
import json
import logging
from pathlib import Path

from check_app.api.serializers import CheckReportSerializer, EpsilonSplitReportSerializer
from check_app.reports import EpsilonSplitReport
from core.exceptions import EmptySeriesError

from .svg import emit_svg

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1


def serialize_report(report):
    if isinstance(report, EpsilonSplitReport):
        return EpsilonSplitReportSerializer(report).data
    return CheckReportSerializer(report).data


def _plain(value):
    """Serializer output (ReturnDict, OrderedDict) as plain JSON types."""
    return json.loads(json.dumps(value))


def report_document(result):
    return {
        'format_version': FORMAT_VERSION,
        'suite': result.suite,
        'config': result.config,
        'reports': [_plain(serialize_report(report)) for report in result.reports],
        'summary': _plain(result.summary),
    }


def write_json(document, path):
    path = Path(path)
    path.write_text(json.dumps(document, sort_keys=True, indent=2) + '\n', encoding='utf-8')
    logger.info("wrote %s", path)
    return path


def csv_comment(config):
    return f"# lcpoly format_version={FORMAT_VERSION} config={json.dumps(config, sort_keys=True)}"


def write_csv(path, config, header, rows):
    """
    Writes rows under a header, preceded by the config comment line.

    Args:
        path (str | Path): Target file.
        config (dict): Config echo for the comment line.
        header (sequence[str]): Column names.
        rows (iterable[sequence]): Row values; floats are written in their
            shortest round-tripping form.
    """
    path = Path(path)
    with open(path, 'w', encoding='utf-8', newline='') as handle:
        handle.write(csv_comment(config) + '\n')
        writer = csv.writer(handle, lineterminator='\n')
        writer.writerow(header)
        writer.writerows(rows)
    logger.info("wrote %s", path)
    return path


def write_artifacts(result, directory, svg=False):
    """
    Writes <suite>.json, <suite>.csv and, if requested, <suite>-<plot>.svg.

    Args:
        result (RunResult): The finished run.
        directory (str | Path): Target directory; created when missing.
        svg (bool): Also write one SVG per plot of the result.

    Returns:
        list[Path]: The written files in writing order.

    Raises:
        OSError: The directory or a file cannot be written.
    """
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    written = [write_json(report_document(result), directory / f'{result.suite}.json')]
    if result.header:
        written.append(write_csv(directory / f'{result.suite}.csv', result.config, result.header, result.rows))
    if svg:
        metadata = {'format_version': FORMAT_VERSION, 'suite': result.suite, 'config': result.config}
        for name, series in sorted(result.plots.items()):
            try:
                written.append(emit_svg(series, directory / f'{result.suite}-{name}.svg', metadata))
            except EmptySeriesError:
                logger.warning("plot %s of %s has no plottable points; skipped", name, result.suite)
    return written
