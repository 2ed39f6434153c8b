from .base import *  # noqa
from .base import LOGGING, env

# GENERAL
# ------------------------------------------------------------------------------
# https://docs.djangoproject.com/en/dev/ref/settings/#debug
DEBUG = True

# LOGGING
# ------------------------------------------------------------------------------
LOGGING["loggers"]["rvk"]["level"] = env("RVK_LOG_LEVEL", default="DEBUG")  # type: ignore[index]

# Your stuff...
# ------------------------------------------------------------------------------
