"""
Base settings to build other settings files upon.
"""
from pathlib import Path

import environ

BASE_DIR = Path(__file__).resolve(strict=True).parent.parent.parent
# rvk/
APPS_DIR = BASE_DIR / "rvk"
env = environ.Env()

READ_DOT_ENV_FILE = env.bool("DJANGO_READ_DOT_ENV_FILE", default=False)
if READ_DOT_ENV_FILE:
    # OS environment variables take precedence over variables from .env
    env.read_env(str(BASE_DIR / ".env"))

# GENERAL
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#debug
DEBUG = env.bool("DJANGO_DEBUG", False)
# https://docs.djangoproject.com/en/dev/ref/settings/#secret-key
# Nothing is signed by this project; Django still refuses to start without one.
SECRET_KEY = env("DJANGO_SECRET_KEY", default="rvk-not-secret")
TIME_ZONE = "UTC"
# https://docs.djangoproject.com/en/dev/ref/settings/#use-tz
USE_TZ = True
# https://docs.djangoproject.com/en/stable/ref/settings/#std:setting-DEFAULT_AUTO_FIELD
DEFAULT_AUTO_FIELD = "django.db.models.BigAutoField"

# APPS
# ------------------------------------------------------------------------------
DJANGO_APPS: list[str] = []
THIRD_PARTY_APPS = [
    "rest_framework",
]

LOCAL_APPS = [
    "rvk.radar",
]
# https://docs.djangoproject.com/en/dev/ref/settings/#installed-apps
INSTALLED_APPS = DJANGO_APPS + THIRD_PARTY_APPS + LOCAL_APPS

# LOGGING
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#logging
# See https://docs.djangoproject.com/en/dev/topics/logging for
# more details on how to customize your logging configuration.
LOGGING = {
    "version": 1,
    "disable_existing_loggers": False,
    "formatters": {
        "verbose": {
            "format": "%(levelname)s %(asctime)s %(module)s %(process)d %(thread)d %(message)s",
        },
    },
    "handlers": {
        "console": {
            "level": "DEBUG",
            "class": "logging.StreamHandler",
            "formatter": "verbose",
        }
    },
    "root": {"level": "INFO", "handlers": ["console"]},
    "loggers": {
        "rvk": {
            "level": env("RVK_LOG_LEVEL", default="INFO"),
            "handlers": ["console"],
            "propagate": False,
        },
    },
}

# django-rest-framework
# -------------------------------------------------------------------------------
# Only the serializers are used, to validate scene configs.
REST_FRAMEWORK = {
    "UNAUTHENTICATED_USER": None,
}

# RADAR PIPELINE
# ------------------------------------------------------------------------------
# DBSCAN neighborhood radius in meters and core-point threshold.
RVK_CLUSTER_EPS = env.float("RVK_CLUSTER_EPS", default=1.5)
RVK_CLUSTER_MIN_PTS = env.int("RVK_CLUSTER_MIN_PTS", default=3)
# "xy" or "xyz"
RVK_CLUSTER_FEATURE = env("RVK_CLUSTER_FEATURE", default="xy")
# RANSAC needs two seeds and one test point.
RVK_MIN_CLUSTER_SIZE = env.int("RVK_MIN_CLUSTER_SIZE", default=3)
RVK_RANSAC_MAX_TRIALS = env.int("RVK_RANSAC_MAX_TRIALS", default=256)
# Pipeline default for the MAD corridor; RansacParams on its own keeps 1.0.
RVK_RANSAC_THRESHOLD_SCALE = env.float("RVK_RANSAC_THRESHOLD_SCALE", default=0.5)
RVK_RNG_SEED = env.int("RVK_RNG_SEED", default=0)
# "parallel", "sequential" or "lsq-only"
RVK_MODE = env("RVK_MODE", default="parallel")
# 0 picks os.cpu_count()
RVK_WORKERS = env.int("RVK_WORKERS", default=0)

# Benchmark harness
RVK_BENCH_REPEATS = env.int("RVK_BENCH_REPEATS", default=20)
RVK_BENCH_WARMUP = env.int("RVK_BENCH_WARMUP", default=3)
