"""
Django settings for the holevo toolkit.

The project has no web surface and no database: Django provides configuration,
the management-command CLI and the test runner.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/4.2/ref/settings/
"""

import os
from pathlib import Path

from holevo import __version__


def get_env_variable(var_name, default_value=None):
    """Get environment variable or return default value"""
    return os.environ.get(var_name, default_value)


# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# Only used by Django internals (signing); nothing here is secret.
SECRET_KEY = get_env_variable("DJANGO_SECRET_KEY", "holevo-insecure-local-key")

DEBUG = get_env_variable("DEBUG", "false").lower() == "true"

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "rest_framework",
    "holevo.apps.HolevoConfig",
]

# Every command is a pure computation; nothing is persisted.
DATABASES = {}

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {
            "format": "%(asctime)s %(levelname)s %(name)s: %(message)s",
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "plain",
        },
    },
    "loggers": {
        "": {  # This configures the root logger
            "handlers": ["console"],
            "level": get_env_variable("HOLEVO_LOG_LEVEL", "INFO").upper(),
            "propagate": True,
        },
    },
}

USE_TZ = True
TIME_ZONE = "UTC"


# Toolkit settings

HOLEVO_VERSION = __version__

# Largest Hilbert-space dimension (dim ** n) that is ever materialized as a dense matrix.
HOLEVO_DIMENSION_CAP = int(get_env_variable("HOLEVO_DIMENSION_CAP", "4096"))

# Largest number of words / eigen multi-indices enumerated exhaustively.
HOLEVO_ENUMERATION_CAP = int(get_env_variable("HOLEVO_ENUMERATION_CAP", "1000000"))

# Upper bound applied to the --threads flag of simulate/accinfo.
HOLEVO_MAX_THREADS = int(get_env_variable("HOLEVO_MAX_THREADS", "8"))
