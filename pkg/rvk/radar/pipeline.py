"""
Frame-level orchestration: clustering, inlier detection, velocity solve.
"""
from __future__ import annotations

import enum
import logging
from collections.abc import Iterable, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import environ
import numpy as np
from django.conf import settings

from .baseline import sequential_lsq, sequential_ransac
from .clustering import MIN_CLUSTER_SIZE, ClusteringParams, Feature, dbscan, extract_clusters, prune_clusters
from .exceptions import InvalidConfig, RadarError
from .ransac import RansacParams, combine_masks, run_ransac
from .solver import estimate_all
from .types import Cluster, Frame, InlierMask, VelocityEstimate

logger = logging.getLogger(__name__)


class EstimationMode(enum.Enum):
    PARALLEL = "parallel"
    SEQUENTIAL = "sequential"
    # Every cluster point is an inlier: plain least squares, no outlier rejection.
    LSQ_ONLY = "lsq-only"


# Keys accepted in a pipeline config file, with the environ.Env caster for each.
CONFIG_KEYS = {
    "eps": "float",
    "min_pts": "int",
    "feature": "str",
    "min_cluster_size": "int",
    "max_trials": "int",
    "threshold_scale": "float",
    "rng_seed": "int",
    "mode": "str",
    "workers": "int",
}


class PipelineEnv(environ.Env):
    """``environ.Env`` reading from a private mapping instead of ``os.environ``."""

    ENVIRON: dict[str, str] = {}

    @classmethod
    def from_file(cls, path: Path | str) -> PipelineEnv:
        path = Path(path)
        if not path.is_file():
            raise FileNotFoundError(f"pipeline config {path} does not exist")
        # read_env fills the class mapping, so each file gets a subclass of its own.
        scoped = type(cls.__name__, (cls,), {"ENVIRON": {}})
        try:
            scoped.read_env(str(path))
        except UnicodeDecodeError as exc:
            raise InvalidConfig(f"pipeline config {path} is not valid UTF-8: {exc}") from exc
        return scoped()


@dataclass(frozen=True)
class PipelineConfig:
    clustering: ClusteringParams = ClusteringParams()
    ransac: RansacParams = RansacParams()
    min_cluster_size: int = MIN_CLUSTER_SIZE
    mode: EstimationMode = EstimationMode.PARALLEL
    workers: int = 0

    def __post_init__(self) -> None:
        try:
            object.__setattr__(self, "mode", EstimationMode(self.mode))
        except ValueError:
            choices = ", ".join(m.value for m in EstimationMode)
            raise InvalidConfig(f"unknown mode {self.mode!r}, expected one of {choices}") from None
        if self.min_cluster_size < 2:
            raise InvalidConfig(f"min_cluster_size must be at least 2, got {self.min_cluster_size}")
        if self.workers < 0:
            raise InvalidConfig(f"workers must be >= 0, got {self.workers}")

    @classmethod
    def from_settings(cls) -> PipelineConfig:
        return cls.from_values(
            eps=settings.RVK_CLUSTER_EPS,
            min_pts=settings.RVK_CLUSTER_MIN_PTS,
            feature=settings.RVK_CLUSTER_FEATURE,
            min_cluster_size=settings.RVK_MIN_CLUSTER_SIZE,
            max_trials=settings.RVK_RANSAC_MAX_TRIALS,
            threshold_scale=settings.RVK_RANSAC_THRESHOLD_SCALE,
            rng_seed=settings.RVK_RNG_SEED,
            mode=settings.RVK_MODE,
            workers=settings.RVK_WORKERS,
        )

    @classmethod
    def from_values(cls, **values: Any) -> PipelineConfig:
        unknown = set(values) - set(CONFIG_KEYS)
        if unknown:
            raise InvalidConfig(f"unknown config keys: {', '.join(sorted(unknown))}")
        try:
            return cls(
                clustering=ClusteringParams(
                    eps=values["eps"], min_pts=values["min_pts"], feature=Feature(values["feature"])
                ),
                ransac=RansacParams(
                    max_trials=values["max_trials"],
                    threshold_scale=values["threshold_scale"],
                    rng_seed=values["rng_seed"],
                ),
                min_cluster_size=values["min_cluster_size"],
                mode=values["mode"],
                workers=values["workers"],
            )
        except InvalidConfig:
            raise
        except ValueError as exc:
            raise InvalidConfig(str(exc)) from exc

    def as_values(self) -> dict[str, Any]:
        return {
            "eps": self.clustering.eps,
            "min_pts": self.clustering.min_pts,
            "feature": self.clustering.feature.value,
            "min_cluster_size": self.min_cluster_size,
            "max_trials": self.ransac.max_trials,
            "threshold_scale": self.ransac.threshold_scale,
            "rng_seed": self.ransac.rng_seed,
            "mode": self.mode.value,
            "workers": self.workers,
        }

    def override(self, **values: Any) -> PipelineConfig:
        """A copy with every non-None value replaced."""
        return self.from_values(**(self.as_values() | {k: v for k, v in values.items() if v is not None}))

    def with_file(self, path: Path | str) -> PipelineConfig:
        """Apply a dotenv-style ``key=value`` file on top of this config."""
        env = PipelineEnv.from_file(path)
        unknown = set(env.ENVIRON) - set(CONFIG_KEYS)
        if unknown:
            raise InvalidConfig(f"{path}: unknown config keys: {', '.join(sorted(unknown))}")
        values = {}
        for key in env.ENVIRON:
            try:
                values[key] = getattr(env, CONFIG_KEYS[key])(key)
            except ValueError as exc:
                raise InvalidConfig(f"{path}: {key}: {exc}") from exc
        return self.override(**values)


@dataclass(frozen=True, eq=False)
class FrameResult:
    frame: Frame
    clusters: list[Cluster]
    masks: list[InlierMask]
    # Frame-level OR of the winning masks.
    inlier_subset: np.ndarray
    estimates: list[VelocityEstimate]


def all_inliers(clusters: Sequence[Cluster]) -> list[InlierMask]:
    return [
        InlierMask(cluster.cluster_id, np.ones(len(cluster), dtype=bool), len(cluster), winning_trial=-1)
        for cluster in clusters
    ]


def estimate_frame(frame: Frame, config: PipelineConfig) -> FrameResult:
    """Cluster one frame and estimate a velocity for every surviving cluster."""
    labeled = prune_clusters(dbscan(frame, config.clustering), config.min_cluster_size)
    clusters = extract_clusters(labeled, config.min_cluster_size)
    points = [labeled.cluster_points(cluster) for cluster in clusters]

    match config.mode:
        case EstimationMode.PARALLEL:
            masks = run_ransac(
                points, config.ransac, workers=config.workers, min_cluster_size=config.min_cluster_size
            )
            estimates = estimate_all(labeled, clusters, masks, workers=config.workers)
        case EstimationMode.SEQUENTIAL:
            masks = sequential_ransac(points, config.ransac, min_cluster_size=config.min_cluster_size)
            estimates = sequential_lsq(labeled, clusters, masks)
        case EstimationMode.LSQ_ONLY:
            masks = all_inliers(clusters)
            estimates = estimate_all(labeled, clusters, masks, workers=config.workers)

    return FrameResult(
        frame=labeled,
        clusters=clusters,
        masks=masks,
        inlier_subset=combine_masks(labeled, masks),
        estimates=estimates,
    )


def estimate_frames(frames: Iterable[Frame], config: PipelineConfig) -> list[FrameResult]:
    """Run :func:`estimate_frame` over every frame; a frame that fails is logged and skipped."""
    results = []
    for frame in frames:
        try:
            result = estimate_frame(frame, config)
        except RadarError:
            logger.exception("Skipping frame %s", frame.frame_id)
            continue
        logger.info(
            "Frame %s: %d points, %d clusters, %d inliers (%s)",
            frame.frame_id,
            len(frame),
            len(result.clusters),
            int(result.inlier_subset.sum()),
            config.mode.value,
        )
        results.append(result)
    return results
