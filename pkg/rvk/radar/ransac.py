"""
Data-parallel RANSAC inlier detection over every cluster of a frame.

Each cluster is mapped to the (azimuth, doppler) plane, min-max normalized,
and ``max_trials`` line hypotheses are scored against a corridor whose
half-width is the mean absolute deviation of the normalized dopplers about
their median. The conceptual kernel has ``max_trials * n_clusters`` trial
tasks; trial ``t`` of cluster ``c`` draws its seed pair from a counter-based
generator keyed by ``(rng_seed, c, t)``, so any schedule yields the same
masks as the plain sequential loop.

The line only selects inliers. The velocity is solved afterwards by
:mod:`rvk.radar.solver` on the inlier subset.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass

import numpy as np
import numpy.typing as npt

from .clustering import MIN_CLUSTER_SIZE
from .exceptions import ClusterTooSmall, DegenerateSeeds, InvalidFrame, TooFewPoints
from .parallel import map_blocks, split_blocks
from .types import ClusterPoints, Frame, InlierMask

logger = logging.getLogger(__name__)

EPS_SEED = 1e-12
# Upper bound on trial x point cells evaluated by one block.
BLOCK_CELLS = 1 << 21

_MASK64 = (1 << 64) - 1
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)


@dataclass(frozen=True)
class RansacParams:
    max_trials: int = 256
    threshold_scale: float = 1.0
    rng_seed: int = 0

    def __post_init__(self) -> None:
        if self.max_trials < 1:
            raise ValueError(f"max_trials must be at least 1, got {self.max_trials}")
        if not self.threshold_scale > 0:
            raise ValueError(f"threshold_scale must be positive, got {self.threshold_scale}")

    def thread_count(self, n_clusters: int) -> int:
        return self.max_trials * n_clusters


@dataclass(frozen=True)
class LineModel:
    m: float
    c: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.m) and math.isfinite(self.c)):
            raise DegenerateSeeds(f"line through the seeds is not finite (m={self.m}, c={self.c})")


@dataclass(frozen=True, eq=False)
class NormalizedCluster:
    """Cluster points mapped to [0, 1] x [0, 1] as (azimuth, doppler).

    ``normalized = (raw - offset) / scale`` per axis; an axis with zero span
    has ``scale == 0`` and every point sits at 0.5 on it.
    """

    pts: np.ndarray
    offset: np.ndarray
    scale: np.ndarray

    def __len__(self) -> int:
        return len(self.pts)


@dataclass(frozen=True, eq=False)
class PreparedCluster:
    cluster_id: int
    normalized: NormalizedCluster
    threshold: float

    def __len__(self) -> int:
        return len(self.normalized)


def _mix64(z: np.ndarray) -> np.ndarray:
    # SplitMix64 finalizer
    z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
    return z ^ (z >> np.uint64(31))


def seed_pairs(
    rng_seed: int, cluster_id: int, trial_indices: npt.ArrayLike, n_points: int
) -> tuple[np.ndarray, np.ndarray]:
    """Distinct seed indices ``(first, second)`` for each trial index, uniform over the cluster.

    Pure function of its arguments: trial ``t`` of a cluster always draws the
    same pair whatever else is evaluated alongside it.
    """
    if n_points < 2:
        raise TooFewPoints(f"a seed pair needs 2 points, cluster {cluster_id} has {n_points}")
    trials = np.atleast_1d(np.asarray(trial_indices, dtype=np.uint64))
    with np.errstate(over="ignore"):
        stream = _mix64(np.array([cluster_id & _MASK64], dtype=np.uint64) + _GOLDEN)
        key = _mix64(np.array([rng_seed & _MASK64], dtype=np.uint64) ^ stream)
        counter = trials * np.uint64(2)
        u1 = _mix64(key + _GOLDEN * (counter + np.uint64(1)))
        u2 = _mix64(key + _GOLDEN * (counter + np.uint64(2)))
    first = (u1 % np.uint64(n_points)).astype(np.int64)
    second = (u2 % np.uint64(n_points - 1)).astype(np.int64)
    second += second >= first
    return first, second


def normalize_cluster(points: npt.ArrayLike) -> NormalizedCluster:
    pts = np.asarray(points, dtype=np.float64).reshape(-1, 2)
    if len(pts) == 0:
        raise TooFewPoints("cannot normalize an empty cluster")
    offset = pts.min(axis=0)
    scale = pts.max(axis=0) - offset
    degenerate = scale == 0
    normalized = np.where(degenerate, 0.5, (pts - offset) / np.where(degenerate, 1.0, scale))
    return NormalizedCluster(pts=normalized, offset=offset, scale=scale)


def mad_threshold(values: npt.ArrayLike, threshold_scale: float = 1.0) -> float:
    """Corridor half-width: ``threshold_scale`` times the mean absolute deviation about the median."""
    values = np.asarray(values, dtype=np.float64)
    if values.size == 0:
        raise TooFewPoints("mad_threshold needs at least one value")
    return threshold_scale * float(np.mean(np.abs(values - np.median(values))))


def line_from_seeds(p1: npt.ArrayLike, p2: npt.ArrayLike) -> LineModel:
    x1, y1 = (float(v) for v in p1)
    x2, y2 = (float(v) for v in p2)
    if abs(x2 - x1) < EPS_SEED:
        raise DegenerateSeeds(f"seeds share azimuth {x1!r}")
    m = (y2 - y1) / (x2 - x1)
    return LineModel(m=m, c=y1 - m * x1)


def _distance(aa, cc, x, y, bb=1.0):
    # Shared by the scalar and batched paths so both round identically.
    return np.abs(aa * x + bb * y + cc) / np.sqrt(aa * aa + bb * bb)


def point_line_distance(line: LineModel, p: npt.ArrayLike):
    """Perpendicular distance of ``p`` (one point or an (n, 2) array) to ``y = m x + c``."""
    p = np.asarray(p, dtype=np.float64)
    distance = _distance(-line.m, -line.c, p[..., 0], p[..., 1])
    return float(distance) if p.ndim == 1 else distance


def evaluate_trial(
    nc: NormalizedCluster,
    seeds: tuple[int, int],
    threshold: float,
    *,
    cluster_id: int = 0,
    trial_index: int = 0,
) -> InlierMask:
    """Score one hypothesis over every point of the cluster, seeds included.

    A degenerate seed pair scores zero with an all-false mask.
    """
    i, j = (int(s) for s in seeds)
    if i == j or not (0 <= i < len(nc) and 0 <= j < len(nc)):
        raise ValueError(f"invalid seed pair ({i}, {j}) for a cluster of {len(nc)} points")
    try:
        line = line_from_seeds(nc.pts[i], nc.pts[j])
    except DegenerateSeeds:
        return InlierMask(cluster_id, np.zeros(len(nc), dtype=bool), 0, trial_index)
    mask = point_line_distance(line, nc.pts) <= threshold
    mask[[i, j]] = True
    return InlierMask(cluster_id, mask, int(mask.sum()), trial_index)


def prepare_cluster(
    points: ClusterPoints, params: RansacParams, min_cluster_size: int = MIN_CLUSTER_SIZE
) -> PreparedCluster:
    """Normalize a cluster and compute its corridor once, before any trial runs."""
    minimum = max(min_cluster_size, 2)
    if len(points) < minimum:
        raise ClusterTooSmall(points.cluster_id, len(points), minimum)
    normalized = normalize_cluster(np.column_stack((points.azimuths, points.dopplers)))
    return PreparedCluster(
        cluster_id=points.cluster_id,
        normalized=normalized,
        threshold=mad_threshold(normalized.pts[:, 1], params.threshold_scale),
    )


def keep_all_if_degenerate(best: InlierMask) -> InlierMask:
    """Winner of a cluster whose every seed pair was degenerate: all of its points.

    A non-degenerate trial always counts its two seeds, so a winning count of
    zero means no trial could define a line. Keeping every point lets the
    solver still report the radial speed along the shared bearing.
    """
    if best.inlier_count:
        return best
    logger.debug("Cluster %d: every seed pair is degenerate, keeping all points", best.cluster_id)
    n = len(best.mask)
    return InlierMask(best.cluster_id, np.ones(n, dtype=bool), n, best.winning_trial)


def _evaluate_block(block: Sequence[PreparedCluster], params: RansacParams) -> list[InlierMask]:
    """Evaluate every trial of every cluster in ``block`` as one array program."""
    n_trials = params.max_trials
    sizes = np.array([len(prepared) for prepared in block])
    xs = np.full((len(block), sizes.max()), np.nan)
    ys = np.full_like(xs, np.nan)
    first = np.empty((len(block), n_trials), dtype=np.int64)
    second = np.empty_like(first)
    trials = np.arange(n_trials)
    for k, prepared in enumerate(block):
        xs[k, : sizes[k]] = prepared.normalized.pts[:, 0]
        ys[k, : sizes[k]] = prepared.normalized.pts[:, 1]
        first[k], second[k] = seed_pairs(params.rng_seed, prepared.cluster_id, trials, int(sizes[k]))
    thresholds = np.array([prepared.threshold for prepared in block])

    rows = np.arange(len(block))[:, None]
    x1, y1 = xs[rows, first], ys[rows, first]
    x2, y2 = xs[rows, second], ys[rows, second]
    dx = x2 - x1
    degenerate = np.abs(dx) < EPS_SEED
    with np.errstate(divide="ignore", invalid="ignore"):
        m = np.where(degenerate, 0.0, (y2 - y1) / dx)
    c = y1 - m * x1

    distances = _distance(-m[..., None], -c[..., None], xs[:, None, :], ys[:, None, :])
    inliers = distances <= thresholds[:, None, None]
    inliers &= ~degenerate[..., None]
    inliers[rows, trials, first] |= ~degenerate
    inliers[rows, trials, second] |= ~degenerate

    counts = inliers.sum(axis=2)
    # argmax keeps the first maximum: ties go to the lowest trial index.
    winners = counts.argmax(axis=1)
    return [
        keep_all_if_degenerate(
            InlierMask(
                cluster_id=prepared.cluster_id,
                mask=inliers[k, winners[k], : sizes[k]].copy(),
                inlier_count=int(counts[k, winners[k]]),
                winning_trial=int(winners[k]),
            )
        )
        for k, prepared in enumerate(block)
    ]


def run_ransac(
    clusters: Sequence[ClusterPoints],
    params: RansacParams,
    *,
    workers: int = 0,
    min_cluster_size: int = MIN_CLUSTER_SIZE,
) -> list[InlierMask]:
    """Best inlier mask for every cluster, in input order.

    Clusters are cut into contiguous blocks evaluated on a thread pool; the
    result is identical for any ``workers`` value.
    """
    prepared = [prepare_cluster(points, params, min_cluster_size) for points in clusters]
    blocks = split_blocks(
        prepared,
        workers,
        weights=[params.max_trials * len(p) for p in prepared],
        max_weight=BLOCK_CELLS,
    )
    masks = [mask for block in map_blocks(lambda b: _evaluate_block(b, params), blocks, workers) for mask in block]
    if logger.isEnabledFor(logging.DEBUG):
        for mask in masks:
            logger.debug(
                "Cluster %d: trial %d wins with %d/%d inliers",
                mask.cluster_id,
                mask.winning_trial,
                mask.inlier_count,
                len(mask.mask),
            )
    return masks


def combine_masks(frame: Frame, masks: Sequence[InlierMask]) -> np.ndarray:
    """Frame-level inlier subset: OR of the per-cluster winners, noise always False."""
    subset = np.zeros(len(frame), dtype=bool)
    if not masks:
        return subset
    labels = frame.label_array
    for mask in masks:
        members = np.flatnonzero(labels == mask.cluster_id)
        if len(members) != len(mask.mask):
            raise InvalidFrame(
                f"mask for cluster {mask.cluster_id} has {len(mask.mask)} entries, the frame has {len(members)}"
            )
        subset[members[mask.mask]] = True
    return subset
