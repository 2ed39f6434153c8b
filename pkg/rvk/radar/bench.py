"""
Benchmark harness and robustness study.

``run_bench`` times the parallel kernels against the sequential baselines
over a grid of (clusters, points per cluster). ``run_robustness`` compares
RANSAC + least squares with plain least squares on randomized scenes
carrying micro-doppler outliers.
"""
from __future__ import annotations

import logging
import math
import statistics
import timeit
from collections import Counter
from collections.abc import Callable, Iterable, Sequence
from dataclasses import astuple, dataclass, fields, replace
from pathlib import Path

import numpy as np

from .baseline import sequential_lsq, sequential_ransac
from .exceptions import RadarError
from .frame_io import TruthRecord, csv_writer
from .pipeline import EstimationMode, FrameResult, PipelineConfig, estimate_frame
from .ransac import RansacParams, run_ransac
from .solver import estimate_all
from .synth import ObjectSpec, SceneSpec, generate_frame, random_scene
from .types import Cluster, ClusterPoints, Frame, VelocityEstimate

logger = logging.getLogger(__name__)

DEFAULT_GRID = tuple((n_clusters, points) for n_clusters in (8, 16, 32, 64) for points in (100, 150))
BENCH_COLUMNS = (
    "n_clusters",
    "points_per_cluster",
    "parallel_ransac_ms",
    "sequential_ransac_ms",
    "parallel_lsq_ms",
    "sequential_lsq_ms",
)
# Pass marks of the robustness study.
SPEED_TOLERANCE = 0.15
HEADING_TOLERANCE_DEG = 2.0

# Bench objects sit on an 8-wide grid with 6 m pitch; 2 m boxes leave 4 m gaps.
_BENCH_PITCH = 6.0
_BENCH_COLUMNS_PER_ROW = 8


@dataclass(frozen=True)
class BenchRow:
    n_clusters: int
    points_per_cluster: int
    parallel_ransac_ms: float
    sequential_ransac_ms: float
    parallel_lsq_ms: float
    sequential_lsq_ms: float

    @property
    def ransac_speedup(self) -> float:
        return self.sequential_ransac_ms / self.parallel_ransac_ms if self.parallel_ransac_ms else math.nan

    @property
    def lsq_speedup(self) -> float:
        return self.sequential_lsq_ms / self.parallel_lsq_ms if self.parallel_lsq_ms else math.nan


@dataclass(frozen=True, eq=False)
class BenchWorkload:
    frame: Frame
    clusters: list[Cluster]
    points: list[ClusterPoints]


def bench_scene(n_clusters: int, points_per_cluster: int, seed: int = 0) -> SceneSpec:
    rng = np.random.default_rng([seed % (1 << 64), n_clusters, points_per_cluster])
    objects = []
    for k in range(n_clusters):
        row, column = divmod(k, _BENCH_COLUMNS_PER_ROW)
        heading = rng.uniform(-math.pi, math.pi)
        magnitude = rng.uniform(3.0, 15.0)
        objects.append(
            ObjectSpec(
                center=(10.0 + _BENCH_PITCH * row, _BENCH_PITCH * (column - (_BENCH_COLUMNS_PER_ROW - 1) / 2)),
                extent=(2.0, 2.0),
                v_x=magnitude * math.cos(heading),
                v_y=magnitude * math.sin(heading),
                n_points=points_per_cluster,
                outlier_fraction=0.2,
                doppler_noise_sigma=0.05,
            )
        )
    return SceneSpec(objects=tuple(objects), rng_seed=seed)


def bench_workload(n_clusters: int, points_per_cluster: int, seed: int = 0) -> BenchWorkload:
    """A frame with exactly ``n_clusters`` clusters of ``points_per_cluster`` points.

    Clusters are taken from the ground truth so the timed kernels always see
    the requested shape.
    """
    frame, truth = generate_frame(bench_scene(n_clusters, points_per_cluster, seed))
    labels = [-1] * len(frame)
    for record in truth:
        for index in record.point_indices:
            labels[index] = record.object_id
    frame = frame.with_labels(labels)
    clusters = [Cluster(record.object_id, record.point_indices) for record in truth]
    return BenchWorkload(frame, clusters, [frame.cluster_points(cluster) for cluster in clusters])


def time_call(fn: Callable[[], object], *, repeats: int, warmup: int) -> float:
    """Median wall time of ``fn`` in milliseconds over ``repeats`` runs, after ``warmup`` untimed runs."""
    for _ in range(warmup):
        fn()
    samples = []
    for _ in range(max(repeats, 1)):
        start = timeit.default_timer()
        fn()
        samples.append((timeit.default_timer() - start) * 1000.0)
    return statistics.median(samples)


def bench_cell(
    n_clusters: int,
    points_per_cluster: int,
    params: RansacParams,
    *,
    repeats: int,
    warmup: int,
    workers: int = 0,
) -> BenchRow:
    work = bench_workload(n_clusters, points_per_cluster, params.rng_seed)
    masks = run_ransac(work.points, params, workers=workers)

    def timed(fn: Callable[[], object]) -> float:
        try:
            return time_call(fn, repeats=repeats, warmup=warmup)
        except RadarError:
            logger.exception("Bench cell (%d, %d) failed", n_clusters, points_per_cluster)
            return math.nan

    return BenchRow(
        n_clusters=n_clusters,
        points_per_cluster=points_per_cluster,
        parallel_ransac_ms=timed(lambda: run_ransac(work.points, params, workers=workers)),
        sequential_ransac_ms=timed(lambda: sequential_ransac(work.points, params)),
        parallel_lsq_ms=timed(lambda: estimate_all(work.frame, work.clusters, masks, workers=workers)),
        sequential_lsq_ms=timed(lambda: sequential_lsq(work.frame, work.clusters, masks)),
    )


def run_bench(
    grid: Iterable[tuple[int, int]] = DEFAULT_GRID,
    params: RansacParams | None = None,
    *,
    repeats: int = 20,
    warmup: int = 3,
    workers: int = 0,
) -> list[BenchRow]:
    params = params or RansacParams()
    rows = []
    for n_clusters, points_per_cluster in grid:
        row = bench_cell(n_clusters, points_per_cluster, params, repeats=repeats, warmup=warmup, workers=workers)
        logger.info(
            "Bench (%d clusters, %d points): RANSAC %.2f/%.2f ms, LSQ %.2f/%.2f ms (parallel/sequential)",
            n_clusters,
            points_per_cluster,
            row.parallel_ransac_ms,
            row.sequential_ransac_ms,
            row.parallel_lsq_ms,
            row.sequential_lsq_ms,
        )
        rows.append(row)
    return rows


def write_bench_csv(rows: Iterable[BenchRow], path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv_writer(handle)
        writer.writerow(BENCH_COLUMNS)
        for row in rows:
            writer.writerow([row.n_clusters, row.points_per_cluster, *(f"{ms:.4f}" for ms in astuple(row)[2:])])


def format_table(rows: Sequence[BenchRow]) -> str:
    header = (
        f"{'clusters':>8} {'points':>6} {'RANSAC par':>11} {'RANSAC seq':>11} {'speedup':>8}"
        f" {'LSQ par':>9} {'LSQ seq':>9} {'speedup':>8}"
    )
    lines = [header, "-" * len(header)]
    for row in rows:
        lines.append(
            f"{row.n_clusters:>8} {row.points_per_cluster:>6}"
            f" {row.parallel_ransac_ms:>8.2f} ms {row.sequential_ransac_ms:>8.2f} ms {row.ransac_speedup:>7.1f}x"
            f" {row.parallel_lsq_ms:>6.2f} ms {row.sequential_lsq_ms:>6.2f} ms {row.lsq_speedup:>7.1f}x"
        )
    return "\n".join(lines)


@dataclass(frozen=True)
class RobustnessRow:
    scene: int
    object_id: int
    true_speed: float
    true_heading_deg: float
    ransac_speed: float
    ransac_heading_deg: float
    lsq_speed: float
    lsq_heading_deg: float
    ransac_speed_err: float
    lsq_speed_err: float
    ransac_heading_err_deg: float
    lsq_heading_err_deg: float


ROBUSTNESS_COLUMNS = tuple(f.name for f in fields(RobustnessRow))


@dataclass(frozen=True)
class RobustnessSummary:
    n_objects: int
    ransac_median_speed_err: float
    lsq_median_speed_err: float
    ransac_pass_rate: float

    @property
    def error_ratio(self) -> float:
        return self.lsq_median_speed_err / self.ransac_median_speed_err


def match_objects(result: FrameResult, truth: Sequence[TruthRecord]) -> dict[int, VelocityEstimate | None]:
    """The estimate of the cluster holding most of each object's points, or None if it has no cluster."""
    labels = result.frame.label_array
    by_cluster = {estimate.cluster_id: estimate for estimate in result.estimates}
    matched: dict[int, VelocityEstimate | None] = {}
    for record in truth:
        votes = Counter(int(labels[i]) for i in record.point_indices if labels[i] >= 0)
        matched[record.object_id] = by_cluster.get(votes.most_common(1)[0][0]) if votes else None
    return matched


def heading_error_deg(estimate: float | None, truth: float | None) -> float:
    if estimate is None or truth is None:
        return math.nan
    return abs(math.degrees(math.remainder(estimate - truth, math.tau)))


def _speed_and_heading(estimate: VelocityEstimate | None) -> tuple[float, float | None]:
    if estimate is None:
        return math.nan, None
    return estimate.speed, estimate.heading


def _degrees(angle: float | None) -> float:
    return math.nan if angle is None else math.degrees(angle)


def run_robustness(
    n_scenes: int,
    config: PipelineConfig,
    *,
    seed: int = 0,
    n_objects: tuple[int, int] = (1, 4),
    outlier_fraction: float = 0.3,
    doppler_noise_sigma: float = 0.05,
) -> list[RobustnessRow]:
    """Per-object errors of RANSAC + least squares and of least squares alone on the same frames."""
    rng = np.random.default_rng(seed)
    ransac_config = config
    if config.mode is EstimationMode.LSQ_ONLY:
        ransac_config = replace(config, mode=EstimationMode.PARALLEL)
    lsq_config = replace(config, mode=EstimationMode.LSQ_ONLY)
    rows = []
    for scene in range(n_scenes):
        spec = random_scene(
            rng,
            n_objects=int(rng.integers(n_objects[0], n_objects[1], endpoint=True)),
            outlier_fraction=outlier_fraction,
            doppler_noise_sigma=doppler_noise_sigma,
        )
        frame, truth = generate_frame(spec)
        with_ransac = match_objects(estimate_frame(frame, ransac_config), truth)
        lsq_only = match_objects(estimate_frame(frame, lsq_config), truth)
        for record in truth:
            true_speed = math.hypot(record.v_x, record.v_y)
            ransac_speed, ransac_heading = _speed_and_heading(with_ransac[record.object_id])
            lsq_speed, lsq_heading = _speed_and_heading(lsq_only[record.object_id])
            rows.append(
                RobustnessRow(
                    scene=scene,
                    object_id=record.object_id,
                    true_speed=true_speed,
                    true_heading_deg=_degrees(record.heading),
                    ransac_speed=ransac_speed,
                    ransac_heading_deg=_degrees(ransac_heading),
                    lsq_speed=lsq_speed,
                    lsq_heading_deg=_degrees(lsq_heading),
                    ransac_speed_err=abs(ransac_speed - true_speed),
                    lsq_speed_err=abs(lsq_speed - true_speed),
                    ransac_heading_err_deg=heading_error_deg(ransac_heading, record.heading),
                    lsq_heading_err_deg=heading_error_deg(lsq_heading, record.heading),
                )
            )
    return rows


def summarize_robustness(rows: Sequence[RobustnessRow]) -> RobustnessSummary:
    passed = [
        row.ransac_speed_err <= SPEED_TOLERANCE and row.ransac_heading_err_deg <= HEADING_TOLERANCE_DEG
        for row in rows
    ]
    summary = RobustnessSummary(
        n_objects=len(rows),
        # A missed object (nan) counts as a failure but is left out of the medians.
        ransac_median_speed_err=float(np.nanmedian([row.ransac_speed_err for row in rows])) if rows else math.nan,
        lsq_median_speed_err=float(np.nanmedian([row.lsq_speed_err for row in rows])) if rows else math.nan,
        ransac_pass_rate=sum(passed) / len(rows) if rows else math.nan,
    )
    logger.info(
        "Robustness over %d objects: median speed error %.3f m/s (RANSAC+LSQ) vs %.3f m/s (LSQ only), %.1f%% pass",
        summary.n_objects,
        summary.ransac_median_speed_err,
        summary.lsq_median_speed_err,
        100 * summary.ransac_pass_rate,
    )
    return summary


def write_robustness_csv(rows: Iterable[RobustnessRow], path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv_writer(handle)
        writer.writerow(ROBUSTNESS_COLUMNS)
        for row in rows:
            writer.writerow([value if isinstance(value, int) else repr(value) for value in astuple(row)])


def parse_grid(text: str) -> tuple[tuple[int, int], ...]:
    """``"default"`` or comma separated ``CLUSTERSxPOINTS`` cells, e.g. ``"8x100,64x150"``."""
    if text.strip() == "default":
        return DEFAULT_GRID
    cells = []
    for item in text.split(","):
        n_clusters, sep, points = item.strip().partition("x")
        if not sep:
            raise ValueError(f"grid cell {item!r} is not of the form CLUSTERSxPOINTS")
        cell = (int(n_clusters), int(points))
        if cell[0] < 1 or cell[1] < 3:
            raise ValueError(f"grid cell {item!r} needs at least 1 cluster of 3 points")
        cells.append(cell)
    return tuple(cells)
