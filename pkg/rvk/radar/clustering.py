"""
Density clustering of frame points (DBSCAN) and cluster extraction.
"""
from __future__ import annotations

import enum
import logging
from collections import deque
from dataclasses import dataclass

import numpy as np

from .types import NOISE, Cluster, Frame

logger = logging.getLogger(__name__)

MIN_CLUSTER_SIZE = 3
# Rows of the pairwise distance matrix materialized at once.
_NEIGHBOR_BLOCK = 512


class Feature(enum.Enum):
    XY = "xy"
    XYZ = "xyz"


@dataclass(frozen=True)
class ClusteringParams:
    eps: float = 1.5
    min_pts: int = 3
    feature: Feature = Feature.XY

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.min_pts < 1:
            raise ValueError(f"min_pts must be at least 1, got {self.min_pts}")
        object.__setattr__(self, "feature", Feature(self.feature))


def feature_vectors(frame: Frame, feature: Feature = Feature.XY) -> np.ndarray:
    return frame.xyz if feature is Feature.XYZ else frame.xy


def neighborhoods(points: np.ndarray, eps: float) -> list[np.ndarray]:
    """Indices within ``eps`` (inclusive, self included) of every point, brute force."""
    eps2 = eps * eps
    result: list[np.ndarray] = []
    for start in range(0, len(points), _NEIGHBOR_BLOCK):
        block = points[start : start + _NEIGHBOR_BLOCK]
        d2 = ((block[:, None, :] - points[None, :, :]) ** 2).sum(axis=-1)
        result.extend(np.flatnonzero(row <= eps2) for row in d2)
    return result


def _attach_border_points(
    points: np.ndarray, neighbors: list[np.ndarray], is_core: np.ndarray, labels: np.ndarray
) -> None:
    """Give every non-core point in reach of a core point the label of its nearest core neighbor.

    Equidistant core neighbors are ordered by their coordinates, so the result
    does not depend on point order.
    """
    for index in np.flatnonzero(~is_core):
        cores = neighbors[index][is_core[neighbors[index]]]
        if not len(cores):
            continue
        d2 = ((points[cores] - points[index]) ** 2).sum(axis=-1)
        nearest = cores[d2 == d2.min()]
        # np.lexsort keys run last-to-first: sort by x, then y, then z.
        best = nearest[np.lexsort(points[nearest].T[::-1])[0]]
        labels[index] = labels[best]


def dbscan(frame: Frame, params: ClusteringParams) -> Frame:
    """Label every point with a cluster id or NOISE.

    Clusters are grown over core points only, visiting points in frame order,
    so cluster ids follow the order of each cluster's first core point. Border
    points are attached afterwards to the cluster of their nearest core
    neighbor, which makes the partition independent of point order.
    """
    points = feature_vectors(frame, params.feature)
    neighbors = neighborhoods(points, params.eps)
    is_core = np.array([len(n) >= params.min_pts for n in neighbors], dtype=bool)
    labels = np.full(len(frame), NOISE, dtype=np.int64)

    cluster_id = 0
    for seed in np.flatnonzero(is_core):
        if labels[seed] != NOISE:
            continue
        labels[seed] = cluster_id
        queue = deque([seed])
        while queue:
            current = queue.popleft()
            for neighbor in neighbors[current]:
                if labels[neighbor] != NOISE or not is_core[neighbor]:
                    continue
                labels[neighbor] = cluster_id
                queue.append(neighbor)
        cluster_id += 1

    _attach_border_points(points, neighbors, is_core, labels)

    logger.debug(
        "Frame %s: %d clusters, %d noise points", frame.frame_id, cluster_id, int((labels == NOISE).sum())
    )
    return frame.with_labels(labels)


def prune_clusters(frame: Frame, min_cluster_size: int = MIN_CLUSTER_SIZE) -> Frame:
    """Relabel clusters smaller than ``min_cluster_size`` as noise and renumber the rest from 0."""
    labels = frame.label_array
    ids, counts = np.unique(labels[labels != NOISE], return_counts=True)
    kept = ids[counts >= min_cluster_size]
    remap = np.full(max(int(labels.max(initial=NOISE)) + 2, 1), NOISE, dtype=np.int64)
    remap[kept] = np.arange(len(kept))
    # NOISE (-1) indexes the last slot, which stays NOISE.
    relabeled = remap[labels]
    if len(kept) < len(ids):
        logger.debug(
            "Frame %s: dropped %d clusters below %d points", frame.frame_id, len(ids) - len(kept), min_cluster_size
        )
    return frame.with_labels(relabeled)


def extract_clusters(frame: Frame, min_cluster_size: int = MIN_CLUSTER_SIZE) -> list[Cluster]:
    """One Cluster per surviving label, ordered by cluster id."""
    labels = prune_clusters(frame, min_cluster_size).label_array
    return [
        Cluster(cluster_id=cluster_id, point_indices=tuple(int(i) for i in np.flatnonzero(labels == cluster_id)))
        for cluster_id in range(int(labels.max(initial=NOISE)) + 1)
    ]
