"""
Access to the LCPOLY_* tunables.

The numerical apps are usable as a plain library, so settings are read
lazily and fall back to the documented defaults when Django has not been
configured.
"""
from django.conf import settings


def lcpoly_setting(name, default):
    """
    Returns the value of an LCPOLY_* setting.

    Args:
        name (str): The settings name, e.g. 'LCPOLY_THREADS'.
        default: Value used when settings are unconfigured or lack the name.

    Returns:
        The configured value or the default.
    """
    if not settings.configured:
        return default
    return getattr(settings, name, default)
