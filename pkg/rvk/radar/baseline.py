"""
Sequential reference implementations.

One cluster at a time, one trial at a time, one thread. They share the
keyed seed generator and the arithmetic kernels with the parallel engine,
so their output is bit-identical to :func:`rvk.radar.ransac.run_ransac` and
:func:`rvk.radar.solver.estimate_all`; the benchmark uses them as the
comparison arm.
"""
from __future__ import annotations

from collections.abc import Sequence

import numpy as np

from .clustering import MIN_CLUSTER_SIZE
from .ransac import RansacParams, evaluate_trial, keep_all_if_degenerate, prepare_cluster, seed_pairs
from .solver import check_pairing, estimate_cluster, frame_trig
from .types import Cluster, ClusterPoints, Frame, InlierMask, VelocityEstimate


def sequential_ransac(
    clusters: Sequence[ClusterPoints], params: RansacParams, *, min_cluster_size: int = MIN_CLUSTER_SIZE
) -> list[InlierMask]:
    masks = []
    for points in clusters:
        prepared = prepare_cluster(points, params, min_cluster_size)
        best: InlierMask | None = None
        for trial in range(params.max_trials):
            first, second = seed_pairs(params.rng_seed, prepared.cluster_id, trial, len(prepared))
            candidate = evaluate_trial(
                prepared.normalized,
                (first[0], second[0]),
                prepared.threshold,
                cluster_id=prepared.cluster_id,
                trial_index=trial,
            )
            if best is None or candidate.inlier_count > best.inlier_count:
                best = candidate
        assert best is not None
        masks.append(keep_all_if_degenerate(best))
    return masks


def sequential_lsq(frame: Frame, clusters: Sequence[Cluster], masks: Sequence[InlierMask]) -> list[VelocityEstimate]:
    check_pairing(clusters, masks)
    cos_all, sin_all = frame_trig(frame)
    estimates = []
    for cluster, mask in zip(clusters, masks):
        inliers = np.asarray(cluster.point_indices)[mask.mask]
        estimates.append(
            estimate_cluster(
                cluster.cluster_id,
                cos_all[inliers],
                sin_all[inliers],
                frame.dopplers[inliers],
                frame_id=frame.frame_id,
            )
        )
    return estimates
