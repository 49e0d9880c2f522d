import logging

from django.dispatch import receiver

from check_app.signals import report_ready

logger = logging.getLogger(__name__)


@receiver(report_ready)
def log_report(sender, report, **kwargs):
    """
    Logs every finished checker report.

    Args:
        sender: Name of the checker that produced the report.
        report (CheckReport | EpsilonSplitReport): The report.
        **kwargs: Wildcard keyword arguments.
    """
    logger.info("%s: lhs=%.6g ratio=%.6g", report.name, report.lhs, report.ratio)
    if getattr(report, 'failed', False):
        logger.warning("%s failed: %s", report.name, report.details)
