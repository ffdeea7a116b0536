"""
Django settings for ddd_site project.

Generated by 'django-admin startproject' using Django 5.2.7.

For more information on this file, see
https://docs.djangoproject.com/en/5.2/topics/settings/

For the full list of settings and their values, see
https://docs.djangoproject.com/en/5.2/ref/settings/
"""

import os


# Application definition

INSTALLED_APPS = [
    "core",
    "depth",
    "discrepancy",
    "inference",
    "simulation",
    "ingest",
]

TEMPLATES = [
    {
        "BACKEND": "django.template.backends.django.DjangoTemplates",
        "DIRS": [],
        "APP_DIRS": True,
        "OPTIONS": {
            "autoescape": True,
        },
    },
]


# Internationalization
# https://docs.djangoproject.com/en/5.2/topics/i18n/

LANGUAGE_CODE = "en-us"

TIME_ZONE = "UTC"

USE_I18N = False

USE_TZ = True


# Valores por defecto del toolkit de profundidad (sobrescribibles por entorno)

def _env_int(name: str, default: int) -> int:
    raw = os.getenv(name, "").strip()
    return int(raw) if raw else default


def _env_float(name: str, default: float) -> float:
    raw = os.getenv(name, "").strip()
    return float(raw) if raw else default


DDD_DEFAULTS = {
    "DIRECTIONS": _env_int("DDD_DIRECTIONS", 5000),
    "EVAL_POINTS": _env_int("DDD_EVAL_POINTS", 2000),
    "BOOTSTRAP": _env_int("DDD_BOOTSTRAP", 200),
    "REPS": _env_int("DDD_REPS", 200),
    "ALPHA": _env_float("DDD_ALPHA", 0.05),
    "REF_FLOOR": _env_int("DDD_REF_FLOOR", 5000),
    "REF_FACTOR": _env_int("DDD_REF_FACTOR", 10),
    "THREADS": _env_int("DDD_THREADS", 1),
    "EVAL_GRID": os.getenv("DDD_EVAL_GRID", "sphere").strip() or "sphere",
}


# Logging: stdout queda reservado para los documentos de resultados.

LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "plain": {"format": "%(levelname)s %(name)s: %(message)s"},
    },
    "handlers": {
        "console": {
            "class": "logging.StreamHandler",
            "formatter": "plain",
            "stream": "ext://sys.stderr",
        },
    },
    "root": {
        "handlers": ["console"],
        "level": os.getenv("DDD_LOG_LEVEL", "WARNING").upper(),
    },
}
