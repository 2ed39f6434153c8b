"""
With these settings, tests run faster.
"""

from .base import *  # noqa
from .base import LOGGING, env

# LOGGING
# ------------------------------------------------------------------------------
# Let records reach the root logger so pytest's caplog sees them.
LOGGING["loggers"]["rvk"].update(handlers=[], propagate=True)  # type: ignore[attr-defined]

# RADAR PIPELINE
# ------------------------------------------------------------------------------
# Two workers are enough to exercise the thread pool on any CI box.
RVK_WORKERS = env.int("RVK_WORKERS", default=2)
RVK_BENCH_REPEATS = env.int("RVK_BENCH_REPEATS", default=3)
RVK_BENCH_WARMUP = env.int("RVK_BENCH_WARMUP", default=1)
