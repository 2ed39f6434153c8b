"""
Core value types shared by every stage of the pipeline.

Conventions used throughout:

* ``x`` is longitudinal, ``y`` lateral (ADAS axes), meters.
* ``azimuth`` is measured from the X axis toward the Y axis, radians in (-pi, pi].
* ``doppler`` is the radial projected speed in m/s, positive when receding.
"""
from __future__ import annotations

import enum
import math
from collections.abc import Sequence
from dataclasses import dataclass, field, replace
from functools import cached_property

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidFrame, InvalidPoint

NOISE = -1


def wrap_azimuth(theta: float) -> float:
    """Map any finite angle onto (-pi, pi]."""
    wrapped = math.remainder(theta, math.tau)
    if wrapped <= -math.pi:
        wrapped += math.tau
    return wrapped


def radial_projection(v_x, v_y, azimuth):
    """Radial speed seen at ``azimuth`` for an object moving with (v_x, v_y).

    Works on floats and on numpy arrays alike.
    """
    return v_x * np.cos(azimuth) + v_y * np.sin(azimuth)


def _readonly(values: npt.ArrayLike, dtype=np.float64) -> np.ndarray:
    array = np.array(values, dtype=dtype)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class RadarPoint:
    x: float
    y: float
    z: float
    doppler: float
    azimuth: float

    def __post_init__(self) -> None:
        for name in ("x", "y", "z", "doppler", "azimuth"):
            if not math.isfinite(getattr(self, name)):
                raise InvalidPoint(f"{name} must be finite, got {getattr(self, name)!r}")
        if not -math.pi < self.azimuth <= math.pi:
            raise InvalidPoint(f"azimuth {self.azimuth!r} outside (-pi, pi]")


@dataclass(frozen=True)
class Cluster:
    cluster_id: int
    point_indices: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.point_indices:
            raise InvalidFrame(f"cluster {self.cluster_id} has no points")
        if any(b <= a for a, b in zip(self.point_indices, self.point_indices[1:])):
            raise InvalidFrame(f"cluster {self.cluster_id} indices are not strictly increasing")
        if self.point_indices[0] < 0:
            raise InvalidFrame(f"cluster {self.cluster_id} has a negative index")

    def __len__(self) -> int:
        return len(self.point_indices)


@dataclass(frozen=True, eq=False)
class ClusterPoints:
    """The (azimuth, doppler) samples of one cluster, in frame order."""

    cluster_id: int
    azimuths: np.ndarray
    dopplers: np.ndarray

    def __len__(self) -> int:
        return len(self.azimuths)


@dataclass(frozen=True)
class Frame:
    frame_id: int
    points: tuple[RadarPoint, ...]
    timestamp: float | None = None
    labels: tuple[int, ...] | None = None

    def __post_init__(self) -> None:
        if self.labels is None:
            return
        if len(self.labels) != len(self.points):
            raise InvalidFrame(f"frame {self.frame_id}: {len(self.labels)} labels for {len(self.points)} points")
        cluster_ids = set(self.labels) - {NOISE}
        if any(label < NOISE for label in cluster_ids) or cluster_ids != set(range(len(cluster_ids))):
            raise InvalidFrame(f"frame {self.frame_id}: cluster ids must be contiguous from 0")

    def __len__(self) -> int:
        return len(self.points)

    @cached_property
    def xyz(self) -> np.ndarray:
        return _readonly([(p.x, p.y, p.z) for p in self.points]).reshape(-1, 3)

    @property
    def xy(self) -> np.ndarray:
        return self.xyz[:, :2]

    @cached_property
    def dopplers(self) -> np.ndarray:
        return _readonly([p.doppler for p in self.points])

    @cached_property
    def azimuths(self) -> np.ndarray:
        return _readonly([p.azimuth for p in self.points])

    @cached_property
    def label_array(self) -> np.ndarray:
        if self.labels is None:
            raise InvalidFrame(f"frame {self.frame_id} has not been clustered")
        return _readonly(self.labels, dtype=np.int64)

    @property
    def n_clusters(self) -> int:
        if self.labels is None:
            return 0
        return max(self.labels, default=NOISE) + 1

    def with_labels(self, labels: Sequence[int]) -> Frame:
        return replace(self, labels=tuple(int(label) for label in labels))

    def cluster_points(self, cluster: Cluster) -> ClusterPoints:
        indices = np.asarray(cluster.point_indices)
        if indices[-1] >= len(self.points):
            raise InvalidFrame(f"cluster {cluster.cluster_id} indexes past the end of frame {self.frame_id}")
        return ClusterPoints(cluster.cluster_id, self.azimuths[indices], self.dopplers[indices])


@dataclass(frozen=True, eq=False)
class InlierMask:
    cluster_id: int
    mask: np.ndarray
    inlier_count: int
    winning_trial: int

    def __post_init__(self) -> None:
        mask = _readonly(self.mask, dtype=bool)
        object.__setattr__(self, "mask", mask)
        if int(mask.sum()) != self.inlier_count:
            raise ValueError(f"inlier_count {self.inlier_count} disagrees with mask ({int(mask.sum())} set)")

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, InlierMask):
            return NotImplemented
        return (
            self.cluster_id == other.cluster_id
            and self.inlier_count == other.inlier_count
            and self.winning_trial == other.winning_trial
            and np.array_equal(self.mask, other.mask)
        )

    def __repr__(self) -> str:
        return (
            f"InlierMask(cluster_id={self.cluster_id}, inlier_count={self.inlier_count}/{len(self.mask)}, "
            f"winning_trial={self.winning_trial})"
        )


class Diagnostic(enum.Enum):
    OK = "ok"
    RANK_DEFICIENT = "rank_deficient"
    TOO_FEW_POINTS = "too_few_points"
    NO_INLIERS = "no_inliers"
    ZERO_VELOCITY = "zero_velocity"


@dataclass(frozen=True)
class VelocityEstimate:
    cluster_id: int
    v_x: float
    v_y: float
    heading: float | None
    inlier_count: int
    condition_ok: bool
    frame_id: int = 0
    diagnostic: Diagnostic = field(default=Diagnostic.OK)

    @property
    def speed(self) -> float:
        return math.hypot(self.v_x, self.v_y)
