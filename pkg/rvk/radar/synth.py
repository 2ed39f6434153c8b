"""
Synthetic radar scenes with known ground truth.

Each object is a box of points moving rigidly with one velocity; every
point measures the radial projection of that velocity plus Gaussian noise.
A fixed share of each object's points carries an extra doppler offset,
standing in for the micro-doppler of wheels and other moving parts. The
ego vehicle is stationary, so all velocities are relative.
"""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .clustering import MIN_CLUSTER_SIZE
from .exceptions import InvalidSpec, ZeroVelocity
from .frame_io import TruthRecord
from .solver import heading_angle
from .types import Frame, RadarPoint, radial_projection

logger = logging.getLogger(__name__)

_MASK64 = (1 << 64) - 1


def _finite(*values: float) -> bool:
    return all(math.isfinite(v) for v in values)


@dataclass(frozen=True)
class ObjectSpec:
    center: tuple[float, float]
    extent: tuple[float, float]
    v_x: float
    v_y: float
    n_points: int
    outlier_fraction: float = 0.0
    doppler_noise_sigma: float = 0.0
    # Magnitude range of the micro-doppler offset; the sign is drawn per point.
    outlier_offset_range: tuple[float, float] = (2.0, 5.0)
    height: float = 1.5

    def __post_init__(self) -> None:
        errors: dict[str, list[str]] = {}
        if not _finite(*self.center, *self.extent, self.v_x, self.v_y, *self.outlier_offset_range, self.height):
            errors["non_field_errors"] = ["all values must be finite"]
        if not all(e > 0 for e in self.extent):
            errors["extent"] = ["extent must be positive along both axes"]
        if self.n_points < MIN_CLUSTER_SIZE:
            errors["n_points"] = [f"at least {MIN_CLUSTER_SIZE} points are required"]
        if not 0 <= self.outlier_fraction < 0.5:
            errors["outlier_fraction"] = ["outlier_fraction must be in [0, 0.5)"]
        if not self.doppler_noise_sigma >= 0:
            errors["doppler_noise_sigma"] = ["doppler_noise_sigma must be non-negative"]
        low, high = self.outlier_offset_range
        if not 0 <= low <= high:
            errors["outlier_offset_range"] = ["expected 0 <= min <= max"]
        if errors:
            raise InvalidSpec(errors)

    @property
    def n_outliers(self) -> int:
        return math.floor(self.outlier_fraction * self.n_points + 1e-9)

    def box(self, dt: float = 0.0) -> tuple[float, float, float, float]:
        """(x_min, x_max, y_min, y_max) after moving for ``dt`` seconds."""
        cx, cy = self.center[0] + self.v_x * dt, self.center[1] + self.v_y * dt
        hx, hy = self.extent[0] / 2, self.extent[1] / 2
        return cx - hx, cx + hx, cy - hy, cy + hy


@dataclass(frozen=True)
class SceneSpec:
    objects: tuple[ObjectSpec, ...]
    n_noise_points: int = 0
    field_of_view: tuple[float, float] = (-math.pi / 2, math.pi / 2)
    rng_seed: int = 0
    max_range: float = 60.0
    noise_doppler_limit: float = 10.0
    # Objects closer than this would merge under clustering.
    min_gap: float = 1.5
    n_frames: int = 1
    frame_interval: float = 0.1
    version: int = field(default=1, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "objects", tuple(self.objects))
        errors: dict[str, list[str]] = {}
        low, high = self.field_of_view
        if not -math.pi <= low < high <= math.pi:
            errors["field_of_view"] = ["expected -pi <= min < max <= pi"]
        if self.n_noise_points < 0:
            errors["n_noise_points"] = ["n_noise_points must be non-negative"]
        if not self.max_range > 1.0:
            errors["max_range"] = ["max_range must exceed 1 m"]
        if not self.noise_doppler_limit >= 0:
            errors["noise_doppler_limit"] = ["noise_doppler_limit must be non-negative"]
        if self.n_frames < 1:
            errors["n_frames"] = ["at least one frame is required"]
        if not self.frame_interval > 0:
            errors["frame_interval"] = ["frame_interval must be positive"]
        if errors:
            raise InvalidSpec(errors)
        for frame_index in range(self.n_frames):
            self._check_separation(frame_index * self.frame_interval)

    def _check_separation(self, dt: float) -> None:
        for (i, a), (j, b) in itertools.combinations(enumerate(self.objects), 2):
            ax0, ax1, ay0, ay1 = a.box(dt)
            bx0, bx1, by0, by1 = b.box(dt)
            gap = max(bx0 - ax1, ax0 - bx1, by0 - ay1, ay0 - by1)
            if gap <= self.min_gap:
                raise InvalidSpec({"objects": [f"objects {i} and {j} are closer than {self.min_gap} m at t={dt:g}s"]})


def _wrap(azimuths: np.ndarray) -> np.ndarray:
    # arctan2 returns -pi for (-0.0, negative x); the frame convention is (-pi, pi].
    return np.where(azimuths == -np.pi, np.pi, azimuths)


def _frame_rng(spec: SceneSpec, frame_index: int) -> np.random.Generator:
    return np.random.default_rng([spec.rng_seed & _MASK64, frame_index])


def generate_frame(spec: SceneSpec, frame_index: int = 0) -> tuple[Frame, list[TruthRecord]]:
    """One frame of the scene and its ground-truth table.

    Object points come first, object by object, then the noise points.
    """
    rng = _frame_rng(spec, frame_index)
    dt = frame_index * spec.frame_interval
    columns: list[np.ndarray] = []
    truth: list[TruthRecord] = []
    start = 0
    for object_id, obj in enumerate(spec.objects):
        x0, x1, y0, y1 = obj.box(dt)
        x = rng.uniform(x0, x1, obj.n_points)
        y = rng.uniform(y0, y1, obj.n_points)
        z = rng.uniform(0.0, obj.height, obj.n_points)
        azimuth = _wrap(np.arctan2(y, x))
        doppler = radial_projection(obj.v_x, obj.v_y, azimuth) + rng.normal(0.0, obj.doppler_noise_sigma, obj.n_points)
        outliers = np.sort(rng.choice(obj.n_points, obj.n_outliers, replace=False))
        offsets = rng.uniform(*obj.outlier_offset_range, obj.n_outliers) * rng.choice([-1.0, 1.0], obj.n_outliers)
        doppler[outliers] += offsets
        columns.append(np.column_stack((x, y, z, doppler, azimuth)))
        try:
            heading: float | None = heading_angle(obj.v_x, obj.v_y)
        except ZeroVelocity:
            heading = None
        truth.append(
            TruthRecord(
                frame_id=frame_index,
                object_id=object_id,
                v_x=obj.v_x,
                v_y=obj.v_y,
                heading=heading,
                point_indices=tuple(range(start, start + obj.n_points)),
                outlier_indices=tuple(int(start + i) for i in outliers),
            )
        )
        start += obj.n_points

    if spec.n_noise_points:
        bearing = rng.uniform(*spec.field_of_view, spec.n_noise_points)
        reach = rng.uniform(1.0, spec.max_range, spec.n_noise_points)
        x, y = reach * np.cos(bearing), reach * np.sin(bearing)
        z = rng.uniform(0.0, 2.0, spec.n_noise_points)
        doppler = rng.uniform(-spec.noise_doppler_limit, spec.noise_doppler_limit, spec.n_noise_points)
        columns.append(np.column_stack((x, y, z, doppler, _wrap(np.arctan2(y, x)))))

    rows = np.concatenate(columns) if columns else np.empty((0, 5))
    points = tuple(RadarPoint(*(float(v) for v in row)) for row in rows)
    frame = Frame(frame_id=frame_index, points=points, timestamp=dt)
    logger.debug("Generated frame %d: %d objects, %d points", frame_index, len(spec.objects), len(points))
    return frame, truth


def generate_sequence(spec: SceneSpec) -> list[tuple[Frame, list[TruthRecord]]]:
    """``spec.n_frames`` consecutive frames, objects advancing by ``v * frame_interval`` per frame."""
    return [generate_frame(spec, frame_index) for frame_index in range(spec.n_frames)]


# Object slots for randomized scenes: two range rows by four lateral columns,
# close enough to the sensor for a wide azimuth spread per object.
SLOT_X = (7.0, 13.5)
SLOT_Y = (-9.6, -3.2, 3.2, 9.6)


def random_scene(
    rng: np.random.Generator,
    *,
    n_objects: int,
    n_points: tuple[int, int] = (120, 200),
    speed: tuple[float, float] = (8.0, 15.0),
    extent: tuple[float, float] = (3.0, 4.5),
    outlier_fraction: float = 0.0,
    doppler_noise_sigma: float = 0.0,
    n_noise_points: int = 0,
) -> SceneSpec:
    """A scene of ``n_objects`` boxes on distinct slots with random size, velocity and point count.

    The slot pitch keeps any two boxes more than 1.5 m apart for extents up to 4.5 m.
    """
    slots = [(x, y) for x in SLOT_X for y in SLOT_Y]
    if not 1 <= n_objects <= len(slots):
        raise InvalidSpec({"objects": [f"between 1 and {len(slots)} objects fit the slot grid"]})
    chosen = rng.choice(len(slots), n_objects, replace=False)
    objects = []
    for slot in chosen:
        magnitude = rng.uniform(*speed)
        direction = rng.uniform(-math.pi, math.pi)
        objects.append(
            ObjectSpec(
                center=slots[slot],
                extent=(float(rng.uniform(*extent)), float(rng.uniform(*extent))),
                v_x=float(magnitude * math.cos(direction)),
                v_y=float(magnitude * math.sin(direction)),
                n_points=int(rng.integers(n_points[0], n_points[1], endpoint=True)),
                outlier_fraction=outlier_fraction,
                doppler_noise_sigma=doppler_noise_sigma,
            )
        )
    return SceneSpec(
        objects=tuple(objects),
        n_noise_points=n_noise_points,
        rng_seed=int(rng.integers(1 << 63)),
    )
