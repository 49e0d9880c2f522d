"""
Django settings for the lcpoly project.

The project has no web surface: Django provides the settings layer, the
management-command CLI, template rendering for SVG artifacts and the
DRF serializers used for every JSON artifact.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path
import os
from dotenv import load_dotenv

load_dotenv()

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

SECRET_KEY = os.getenv(
    'SECRET_KEY', default='lcpoly-insecure-local-only-key')

DEBUG = os.getenv('DEBUG', 'False') == 'True'

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    'django.contrib.contenttypes',
    'django.contrib.auth',
    'rest_framework',
    'poly_app.apps.PolyAppConfig',
    'measure_app.apps.MeasureAppConfig',
    'pushforward_app.apps.PushforwardAppConfig',
    'check_app.apps.CheckAppConfig',
    'harness_app.apps.HarnessAppConfig',
]

TEMPLATES = [
    {
        'BACKEND': 'django.template.backends.django.DjangoTemplates',
        'DIRS': [],
        'APP_DIRS': True,
        'OPTIONS': {
            'context_processors': [],
        },
    },
]


# Database
# Nothing is persisted; every artifact is a file written by the harness.

DATABASES = {}

DEFAULT_AUTO_FIELD = 'django.db.models.BigAutoField'

LANGUAGE_CODE = 'en-us'

TIME_ZONE = 'UTC'

USE_I18N = False

USE_TZ = True


# Numerical tunables

LCPOLY_THREADS = int(os.getenv('LCPOLY_THREADS', 1))
LCPOLY_OUTPUT_DIR = Path(os.getenv('LCPOLY_OUTPUT_DIR', default='lcpoly-output'))
LCPOLY_LOG_LEVEL = os.getenv('LCPOLY_LOG_LEVEL', default='INFO')

LCPOLY_HIT_AND_RUN_BURN_IN = int(os.getenv('LCPOLY_HIT_AND_RUN_BURN_IN', 1000))
LCPOLY_HIT_AND_RUN_THINNING_PER_DIM = int(
    os.getenv('LCPOLY_HIT_AND_RUN_THINNING_PER_DIM', 10))
LCPOLY_BOOTSTRAP_RESAMPLES = int(os.getenv('LCPOLY_BOOTSTRAP_RESAMPLES', 200))
LCPOLY_LINE_GRID_MAX_INTERVALS = int(
    os.getenv('LCPOLY_LINE_GRID_MAX_INTERVALS', 1024))
LCPOLY_QUADRATURE_TOL = float(os.getenv('LCPOLY_QUADRATURE_TOL', 1e-10))


# Logging
# Diagnostics go to stderr; artifacts never contain log output.

LOGGING = {
    'version': 1,
    'disable_existing_loggers': False,
    'formatters': {
        'plain': {
            'format': '{levelname} {name}: {message}',
            'style': '{',
        },
    },
    'handlers': {
        'console': {
            'class': 'logging.StreamHandler',
            'formatter': 'plain',
        },
    },
    'loggers': {
        app: {
            'handlers': ['console'],
            'level': LCPOLY_LOG_LEVEL,
            'propagate': False,
        }
        for app in (
            'core',
            'poly_app',
            'measure_app',
            'pushforward_app',
            'check_app',
            'harness_app',
        )
    },
}
