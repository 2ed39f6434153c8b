import csv
import math

import pytest

from rvk.radar.bench import (
    BENCH_COLUMNS,
    DEFAULT_GRID,
    ROBUSTNESS_COLUMNS,
    BenchRow,
    RobustnessRow,
    bench_workload,
    format_table,
    heading_error_deg,
    match_objects,
    parse_grid,
    run_bench,
    run_robustness,
    summarize_robustness,
    time_call,
    write_bench_csv,
    write_robustness_csv,
)
from rvk.radar.pipeline import PipelineConfig, estimate_frame
from rvk.radar.ransac import RansacParams
from rvk.radar.synth import generate_frame


class TestParseGrid:
    def test_default(self):
        assert parse_grid("default") == DEFAULT_GRID
        assert len(DEFAULT_GRID) == 8

    def test_cells(self):
        assert parse_grid("8x100, 64x150") == ((8, 100), (64, 150))

    @pytest.mark.parametrize("text", ["8", "8x", "ax100", "0x100", "8x2", ""])
    def test_invalid(self, text):
        with pytest.raises(ValueError):
            parse_grid(text)


class TestBenchWorkload:
    @pytest.mark.parametrize("n_clusters, points", [(1, 3), (8, 100), (64, 20)])
    def test_shape(self, n_clusters, points):
        work = bench_workload(n_clusters, points)

        assert len(work.clusters) == n_clusters
        assert all(len(cluster) == points for cluster in work.clusters)
        assert len(work.frame) == n_clusters * points
        assert work.frame.n_clusters == n_clusters

    def test_deterministic(self):
        assert bench_workload(4, 50, seed=3).frame == bench_workload(4, 50, seed=3).frame


def test_time_call_runs_warmup_and_repeats():
    calls = []

    elapsed = time_call(lambda: calls.append(1), repeats=5, warmup=2)

    assert len(calls) == 7
    assert elapsed >= 0.0


class TestRunBench:
    def test_one_row_per_cell(self):
        rows = run_bench([(2, 20), (4, 10)], RansacParams(max_trials=8), repeats=1, warmup=0, workers=2)

        assert [(row.n_clusters, row.points_per_cluster) for row in rows] == [(2, 20), (4, 10)]
        assert all(row.parallel_ransac_ms > 0 and row.sequential_lsq_ms > 0 for row in rows)

    def test_csv(self, tmp_path):
        path = tmp_path / "bench.csv"
        write_bench_csv([BenchRow(8, 100, 1.5, 6.0, 0.25, 1.0)], path)

        with path.open() as handle:
            rows = list(csv.reader(handle))

        assert rows == [list(BENCH_COLUMNS), ["8", "100", "1.5000", "6.0000", "0.2500", "1.0000"]]

    def test_table(self):
        table = format_table([BenchRow(8, 100, 1.5, 6.0, 0.25, 1.0)])

        header, rule, line = table.splitlines()
        assert "RANSAC par" in header
        assert set(rule) == {"-"}
        assert "4.0x" in line

    def test_speedup_of_zero_time(self):
        assert math.isnan(BenchRow(8, 100, 0.0, 6.0, 0.0, 1.0).ransac_speedup)


def test_heading_error_wraps_around():
    assert heading_error_deg(math.radians(179.0), math.radians(-179.0)) == pytest.approx(2.0)
    assert heading_error_deg(0.5, 0.5) == 0.0
    assert math.isnan(heading_error_deg(None, 0.5))


def test_match_objects_by_majority(scene):
    frame, truth = generate_frame(scene)
    result = estimate_frame(frame, PipelineConfig())

    matched = match_objects(result, truth)

    assert matched[0].cluster_id == 0
    assert matched[1].cluster_id == 1


class TestRobustness:
    def test_rows_and_summary(self, caplog):
        rows = run_robustness(3, PipelineConfig().override(threshold_scale=0.5), seed=4, n_objects=(2, 2))

        assert len(rows) == 6
        assert [row.scene for row in rows] == [0, 0, 1, 1, 2, 2]
        summary = summarize_robustness(rows)
        assert summary.n_objects == 6
        assert 0.0 <= summary.ransac_pass_rate <= 1.0
        assert "Robustness over 6 objects" in caplog.text

    def test_lsq_only_config_still_runs_ransac_arm(self):
        rows = run_robustness(1, PipelineConfig(mode="lsq-only"), seed=4, n_objects=(1, 1), outlier_fraction=0.3)
        [row] = rows
        assert row.ransac_speed_err != row.lsq_speed_err

    def test_summary_counts_missed_objects_as_failures(self):
        hit = RobustnessRow(0, 0, 10.0, 0.0, 10.05, 0.5, 11.0, 5.0, 0.05, 1.0, 0.5, 5.0)
        miss = RobustnessRow(0, 1, 10.0, 0.0, *[math.nan] * 4, math.nan, 2.0, math.nan, 8.0)

        summary = summarize_robustness([hit, miss])

        assert summary.ransac_pass_rate == 0.5
        assert summary.ransac_median_speed_err == pytest.approx(0.05)
        assert summary.lsq_median_speed_err == pytest.approx(1.5)
        assert summary.error_ratio == pytest.approx(30.0)

    def test_csv(self, tmp_path):
        path = tmp_path / "robustness.csv"
        row = RobustnessRow(2, 1, 10.0, 45.0, 10.05, 45.5, 11.0, 50.0, 0.05, 1.0, 0.5, 5.0)

        write_robustness_csv([row], path)

        with path.open() as handle:
            header, values = list(csv.reader(handle))
        assert tuple(header) == ROBUSTNESS_COLUMNS
        assert values[:3] == ["2", "1", "10.0"]
