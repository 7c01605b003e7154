"""
Django settings for the GedankenLab project.

The project has no web surface: it is driven through management commands
(``runscenario``, ``validatescenario``) and only uses the ORM to keep a record of
completed scenario runs.

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

from pathlib import Path

from decouple import config

# Build paths inside the project like this: BASE_DIR / 'subdir'.
BASE_DIR = Path(__file__).resolve().parent.parent

# SECURITY WARNING: keep the secret key used in production secret!
SECRET_KEY = config("DJANGO_SECRET_KEY", default="gedankenlab-development-key")

DEBUG = config("DJANGO_DEBUG", cast=bool, default=False)

ALLOWED_HOSTS = []


# Application definition

INSTALLED_APPS = [
    "django.contrib.contenttypes",
    "entanglement",
    "kernels",
    "qubits",
    "signaling",
    "scenarios",
]


# Database
# https://docs.djangoproject.com/en/5.2/ref/settings/#databases

DATABASES = {
    "default": {
        "ENGINE": "django.db.backends.sqlite3",
        "NAME": config("LAB_DATABASE", default=str(BASE_DIR / "db.sqlite3")),
    }
}


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = True

USE_TZ = True


# Default primary key field type
# https://docs.djangoproject.com/en/5.2/ref/settings/#default-auto-field

DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"


# Laboratory

LAB_OUTPUT_DIR = config("LAB_OUTPUT_DIR", default=str(BASE_DIR / "runs"))

LAB_DEFAULT_SEED = config("LAB_DEFAULT_SEED", cast=int, default=20240601)

LAB_MONTE_CARLO_TRIALS = config("LAB_MONTE_CARLO_TRIALS", cast=int, default=10_000)

# Minimum samples per local phase oscillation accepted by the kernel quadrature.
LAB_POINTS_PER_OSCILLATION = config("LAB_POINTS_PER_OSCILLATION", cast=int, default=12)

LAB_CONVERGENCE_TOLERANCE = config("LAB_CONVERGENCE_TOLERANCE", cast=float, default=1e-6)

LAB_LOG_LEVEL = config("LAB_LOG_LEVEL", default="INFO")


# Logging
# https://docs.djangoproject.com/en/5.2/topics/logging/

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "lab": {"format": "{asctime} {levelname} {name}: {message}", "style": "{"},
    },
    "handlers": {
        "console": {"class": "logging.StreamHandler", "formatter": "lab"},
    },
    "loggers": {
        app: {"handlers": ["console"], "level": LAB_LOG_LEVEL, "propagate": False}
        for app in ["entanglement", "kernels", "qubits", "signaling", "scenarios"]
    },
}
