"""
Text formats for frames, estimates and ground truth.

All files are UTF-8 CSV with ``\\n`` line endings, ``.`` decimals and no
quoting. Floats are written with ``repr`` (the shortest string that reads
back to the same double), so a write/read cycle is exact.
"""
from __future__ import annotations

import csv
import logging
import math
from collections.abc import Iterable, Iterator, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import IO

from .exceptions import EmptyFile, InvalidPoint, MalformedHeader, MalformedRow
from .types import Diagnostic, Frame, RadarPoint, VelocityEstimate

logger = logging.getLogger(__name__)

FORMAT_VERSION = 1
FRAME_COLUMNS = ("frame_id", "x", "y", "z", "doppler", "azimuth")
ESTIMATE_COLUMNS = ("frame_id", "cluster_id", "v_x", "v_y", "heading_deg", "inlier_count")
TRUTH_COLUMNS = ("frame_id", "object_id", "v_x", "v_y", "heading_deg", "point_indices", "outlier_indices")
INLIER_COLUMNS = ("frame_id", "point_index", "cluster_id", "inlier")


@dataclass(frozen=True)
class FrameFileHeader:
    format_version: int = FORMAT_VERSION
    columns: tuple[str, ...] = FRAME_COLUMNS

    @property
    def line(self) -> str:
        return ",".join(self.columns)


HEADER = FrameFileHeader()


@dataclass(frozen=True)
class TruthRecord:
    """Ground truth for one object in one frame."""

    frame_id: int
    object_id: int
    v_x: float
    v_y: float
    heading: float | None
    point_indices: tuple[int, ...]
    outlier_indices: tuple[int, ...]


def _format_float(value: float) -> str:
    return repr(float(value))


def csv_writer(handle):
    return csv.writer(handle, lineterminator="\n", quoting=csv.QUOTE_NONE, escapechar="\\")


def _decoded_lines(handle: IO[bytes]) -> Iterator[str]:
    for number, raw in enumerate(handle, start=1):
        try:
            yield raw.decode("utf-8")
        except UnicodeDecodeError as exc:
            raise MalformedRow(number, f"invalid UTF-8 at byte {exc.start}") from None


def _rows(path: Path, header: Sequence[str]) -> Iterator[tuple[int, list[str]]]:
    """Yield (line number, fields) for every data row after checking the header."""
    with Path(path).open("rb") as handle:
        reader = csv.reader(_decoded_lines(handle))
        try:
            first = next(reader)
        except StopIteration:
            raise EmptyFile(f"{path} is empty") from None
        if tuple(first) != tuple(header):
            raise MalformedHeader(",".join(first), ",".join(header))
        for fields in reader:
            if not fields:
                continue
            yield reader.line_num, fields


def _parse_int(text: str, line: int, column: str) -> int:
    try:
        return int(text)
    except ValueError:
        raise MalformedRow(line, f"{column} is not an integer: {text!r}") from None


def _parse_float(text: str, line: int, column: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise MalformedRow(line, f"{column} is not a number: {text!r}") from None
    if not math.isfinite(value):
        raise MalformedRow(line, f"{column} is not finite: {text!r}")
    return value


def _parse_indices(text: str, line: int, column: str) -> tuple[int, ...]:
    return tuple(_parse_int(token, line, column) for token in text.split())


def read_frames(path: Path | str) -> list[Frame]:
    """Read a frame file; one Frame per distinct frame_id, in order of first appearance."""
    grouped: dict[int, list[RadarPoint]] = {}
    for line, fields in _rows(Path(path), HEADER.columns):
        if len(fields) != len(FRAME_COLUMNS):
            raise MalformedRow(line, f"expected {len(FRAME_COLUMNS)} fields, found {len(fields)}")
        frame_id = _parse_int(fields[0], line, "frame_id")
        x, y, z, doppler, azimuth = (
            _parse_float(text, line, column) for text, column in zip(fields[1:], FRAME_COLUMNS[1:])
        )
        try:
            point = RadarPoint(x=x, y=y, z=z, doppler=doppler, azimuth=azimuth)
        except InvalidPoint as exc:
            raise MalformedRow(line, str(exc)) from exc
        grouped.setdefault(frame_id, []).append(point)
    frames = [Frame(frame_id=frame_id, points=tuple(points)) for frame_id, points in grouped.items()]
    logger.debug("Read %d frames from %s", len(frames), path)
    return frames


def write_frames(frames: Iterable[Frame], path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv_writer(handle)
        writer.writerow(HEADER.columns)
        for frame in frames:
            for point in frame.points:
                writer.writerow(
                    [
                        frame.frame_id,
                        *(_format_float(value) for value in (point.x, point.y, point.z, point.doppler, point.azimuth)),
                    ]
                )


def write_estimates(estimates: Iterable[VelocityEstimate], path: Path | str) -> None:
    """Write estimates; heading is converted to degrees and left empty when undefined."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv_writer(handle)
        writer.writerow(ESTIMATE_COLUMNS)
        for estimate in estimates:
            heading = "" if estimate.heading is None else _format_float(math.degrees(estimate.heading))
            writer.writerow(
                [
                    estimate.frame_id,
                    estimate.cluster_id,
                    _format_float(estimate.v_x),
                    _format_float(estimate.v_y),
                    heading,
                    estimate.inlier_count,
                ]
            )


def read_estimates(path: Path | str) -> list[VelocityEstimate]:
    """Read back an estimates file.

    The file does not carry the rank diagnostic, so ``condition_ok`` is
    reconstructed as "both velocity components are finite".
    """
    estimates = []
    for line, fields in _rows(Path(path), ESTIMATE_COLUMNS):
        if len(fields) != len(ESTIMATE_COLUMNS):
            raise MalformedRow(line, f"expected {len(ESTIMATE_COLUMNS)} fields, found {len(fields)}")
        try:
            v_x, v_y = float(fields[2]), float(fields[3])
        except ValueError:
            raise MalformedRow(line, "velocity is not a number") from None
        heading = math.radians(_parse_float(fields[4], line, "heading_deg")) if fields[4] else None
        finite = math.isfinite(v_x) and math.isfinite(v_y)
        estimates.append(
            VelocityEstimate(
                frame_id=_parse_int(fields[0], line, "frame_id"),
                cluster_id=_parse_int(fields[1], line, "cluster_id"),
                v_x=v_x,
                v_y=v_y,
                heading=heading,
                inlier_count=_parse_int(fields[5], line, "inlier_count"),
                condition_ok=finite,
                diagnostic=Diagnostic.OK if finite else Diagnostic.NO_INLIERS,
            )
        )
    return estimates


def write_truth(records: Iterable[TruthRecord], path: Path | str) -> None:
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv_writer(handle)
        writer.writerow(TRUTH_COLUMNS)
        for record in records:
            heading = "" if record.heading is None else _format_float(math.degrees(record.heading))
            writer.writerow(
                [
                    record.frame_id,
                    record.object_id,
                    _format_float(record.v_x),
                    _format_float(record.v_y),
                    heading,
                    " ".join(map(str, record.point_indices)),
                    " ".join(map(str, record.outlier_indices)),
                ]
            )


def read_truth(path: Path | str) -> list[TruthRecord]:
    records = []
    for line, fields in _rows(Path(path), TRUTH_COLUMNS):
        if len(fields) != len(TRUTH_COLUMNS):
            raise MalformedRow(line, f"expected {len(TRUTH_COLUMNS)} fields, found {len(fields)}")
        records.append(
            TruthRecord(
                frame_id=_parse_int(fields[0], line, "frame_id"),
                object_id=_parse_int(fields[1], line, "object_id"),
                v_x=_parse_float(fields[2], line, "v_x"),
                v_y=_parse_float(fields[3], line, "v_y"),
                heading=math.radians(_parse_float(fields[4], line, "heading_deg")) if fields[4] else None,
                point_indices=_parse_indices(fields[5], line, "point_indices"),
                outlier_indices=_parse_indices(fields[6], line, "outlier_indices"),
            )
        )
    return records


def write_inliers(results: Iterable[tuple[Frame, Sequence[bool]]], path: Path | str) -> None:
    """One row per point of every labeled frame: its cluster (or -1) and whether it is an inlier."""
    with Path(path).open("w", encoding="utf-8", newline="") as handle:
        writer = csv_writer(handle)
        writer.writerow(INLIER_COLUMNS)
        for frame, subset in results:
            for index, (label, inlier) in enumerate(zip(frame.label_array, subset)):
                writer.writerow([frame.frame_id, index, int(label), int(bool(inlier))])
