"""
Least-squares vector velocity and heading per cluster.

For inlier points with azimuths ``theta_k`` and radial speeds ``vr_k`` the
velocity ``v`` minimizes ``|A v - vr|`` with rows ``A_k = (cos theta_k,
sin theta_k)``. With two unknowns the pseudoinverse reduces to the 2x2
normal equations, solved in closed form.

Every sum is accumulated strictly in point order (``cumsum``), which makes
the batched solver in :func:`estimate_all` and the per-cluster kernel
:func:`estimate_cluster` agree bit for bit: a non-inlier contributes an
exact ``0.0`` to the running sum.
"""
from __future__ import annotations

import logging
import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
import numpy.typing as npt

from .exceptions import InvalidFrame, RankDeficient, TooFewPoints, ZeroVelocity
from .parallel import map_blocks, split_blocks
from .types import Cluster, Diagnostic, Frame, InlierMask, VelocityEstimate

logger = logging.getLogger(__name__)

EPS_RANK = 1e-8
EPS_VELOCITY = 1e-9


@dataclass(frozen=True, eq=False)
class DesignMatrix:
    """Rows ``(cos theta, sin theta)``, one per inlier point."""

    rows: np.ndarray

    def __post_init__(self) -> None:
        rows = np.asarray(self.rows, dtype=np.float64)
        if rows.ndim != 2 or rows.shape[1] != 2:
            raise ValueError(f"design matrix must be (n, 2), got {rows.shape}")
        if len(rows) < 2:
            raise TooFewPoints(f"least squares needs at least 2 rows, got {len(rows)}")
        object.__setattr__(self, "rows", rows)

    def __len__(self) -> int:
        return len(self.rows)


class NormalSums(NamedTuple):
    scc: float
    scs: float
    sss: float
    bc: float
    bs: float
    sc: float
    ss: float
    svr: float
    n: int


def _ordered_sum(terms: np.ndarray):
    if terms.shape[-1] == 0:
        return np.zeros(terms.shape[:-1])
    return np.cumsum(terms, axis=-1)[..., -1]


def _normal_sums(cos: np.ndarray, sin: np.ndarray, vr: np.ndarray, weights: np.ndarray | None = None) -> list:
    def total(terms):
        return _ordered_sum(terms if weights is None else terms * weights)

    return [
        total(cos * cos),
        total(cos * sin),
        total(sin * sin),
        total(cos * vr),
        total(sin * vr),
        total(cos),
        total(sin),
        total(vr),
    ]


def _solve(sums: NormalSums) -> tuple[float, float]:
    det = sums.scc * sums.sss - sums.scs * sums.scs
    half_trace = (sums.scc + sums.sss) / 2
    if not det >= EPS_RANK * half_trace * half_trace:
        raise RankDeficient(f"det(AtA)={det!r} below tolerance for trace {2 * half_trace!r}")
    v_x = (sums.sss * sums.bc - sums.scs * sums.bs) / det
    v_y = (sums.scc * sums.bs - sums.scs * sums.bc) / det
    return v_x, v_y


def _bearing_fallback(sums: NormalSums) -> tuple[float, float]:
    """Mean doppler along the mean bearing, the only observable direction."""
    norm = math.hypot(sums.sc, sums.ss)
    if sums.n == 0 or norm == 0:
        return 0.0, 0.0
    speed = sums.svr / sums.n
    return speed * sums.sc / norm, speed * sums.ss / norm


def build_design_matrix(azimuths: npt.ArrayLike) -> DesignMatrix:
    azimuths = np.asarray(azimuths, dtype=np.float64)
    if azimuths.size < 2:
        raise TooFewPoints(f"least squares needs at least 2 azimuths, got {azimuths.size}")
    return DesignMatrix(np.column_stack((np.cos(azimuths), np.sin(azimuths))))


def solve_velocity(design: DesignMatrix, dopplers: npt.ArrayLike) -> tuple[float, float]:
    """``(v_x, v_y)`` minimizing the squared radial residual; raises RankDeficient."""
    dopplers = np.asarray(dopplers, dtype=np.float64)
    if len(dopplers) != len(design):
        raise ValueError(f"{len(design)} rows but {len(dopplers)} dopplers")
    cos, sin = design.rows[:, 0], design.rows[:, 1]
    sums = NormalSums(*(float(s) for s in _normal_sums(cos, sin, dopplers)), n=len(design))
    return _solve(sums)


def heading_angle(v_x: float, v_y: float) -> float:
    """Quadrant-aware heading in (-pi, pi]."""
    if abs(v_x) < EPS_VELOCITY and abs(v_y) < EPS_VELOCITY:
        raise ZeroVelocity(f"heading undefined for ({v_x!r}, {v_y!r})")
    heading = math.atan2(v_y, v_x)
    return math.pi if heading == -math.pi else heading


def _finish(cluster_id: int, frame_id: int, sums: NormalSums) -> VelocityEstimate:
    if sums.n == 0:
        return VelocityEstimate(
            cluster_id, math.nan, math.nan, None, 0, False, frame_id=frame_id, diagnostic=Diagnostic.NO_INLIERS
        )
    condition_ok = False
    if sums.n < 2:
        diagnostic = Diagnostic.TOO_FEW_POINTS
        v_x, v_y = _bearing_fallback(sums)
    else:
        try:
            v_x, v_y = _solve(sums)
            condition_ok = True
            diagnostic = Diagnostic.OK
        except RankDeficient:
            diagnostic = Diagnostic.RANK_DEFICIENT
            v_x, v_y = _bearing_fallback(sums)
    try:
        heading: float | None = heading_angle(v_x, v_y)
    except ZeroVelocity:
        heading = None
        if diagnostic is Diagnostic.OK:
            diagnostic = Diagnostic.ZERO_VELOCITY
    if diagnostic is not Diagnostic.OK:
        logger.debug("Frame %s cluster %d: %s", frame_id, cluster_id, diagnostic.value)
    return VelocityEstimate(
        cluster_id=cluster_id,
        v_x=v_x,
        v_y=v_y,
        heading=heading,
        inlier_count=sums.n,
        condition_ok=condition_ok,
        frame_id=frame_id,
        diagnostic=diagnostic,
    )


def frame_trig(frame: Frame) -> tuple[np.ndarray, np.ndarray]:
    """cos and sin of every azimuth in the frame, computed once per frame."""
    return np.cos(frame.azimuths), np.sin(frame.azimuths)


def estimate_cluster(
    cluster_id: int, cos: np.ndarray, sin: np.ndarray, dopplers: np.ndarray, *, frame_id: int = 0
) -> VelocityEstimate:
    """Estimate for one cluster from its inlier samples, in point order."""
    sums = NormalSums(*(float(s) for s in _normal_sums(cos, sin, dopplers)), n=len(dopplers))
    return _finish(cluster_id, frame_id, sums)


def check_pairing(clusters: Sequence[Cluster], masks: Sequence[InlierMask]) -> None:
    if len(clusters) != len(masks):
        raise InvalidFrame(f"{len(clusters)} clusters but {len(masks)} masks")
    for cluster, mask in zip(clusters, masks):
        if cluster.cluster_id != mask.cluster_id or len(cluster) != len(mask.mask):
            raise InvalidFrame(f"mask for cluster {mask.cluster_id} does not match cluster {cluster.cluster_id}")


def _solve_block(
    frame: Frame, trig: tuple[np.ndarray, np.ndarray], block: list[tuple[Cluster, InlierMask]]
) -> list[VelocityEstimate]:
    cos_all, sin_all = trig
    width = max(len(cluster) for cluster, _ in block)
    cos = np.zeros((len(block), width))
    sin = np.zeros_like(cos)
    vr = np.zeros_like(cos)
    weights = np.zeros_like(cos)
    for k, (cluster, mask) in enumerate(block):
        indices = np.asarray(cluster.point_indices)
        cos[k, : len(indices)] = cos_all[indices]
        sin[k, : len(indices)] = sin_all[indices]
        vr[k, : len(indices)] = frame.dopplers[indices]
        weights[k, : len(indices)] = mask.mask
    columns = _normal_sums(cos, sin, vr, weights)
    return [
        _finish(
            cluster.cluster_id,
            frame.frame_id,
            NormalSums(*(float(column[k]) for column in columns), n=mask.inlier_count),
        )
        for k, (cluster, mask) in enumerate(block)
    ]


def estimate_all(
    frame: Frame, clusters: Sequence[Cluster], masks: Sequence[InlierMask], *, workers: int = 0
) -> list[VelocityEstimate]:
    """One estimate per cluster from its inlier points, in cluster order.

    Clusters are solved in blocks on a thread pool; a cluster whose solve
    fails is reported through its diagnostic and never affects the others.
    """
    check_pairing(clusters, masks)
    if not clusters:
        return []
    trig = frame_trig(frame)
    blocks = split_blocks(list(zip(clusters, masks)), workers)
    solved = map_blocks(lambda block: _solve_block(frame, trig, block), blocks, workers)
    return [estimate for block in solved for estimate in block]
