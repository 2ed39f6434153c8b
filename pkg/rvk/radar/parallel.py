"""
Block scheduling for the data-parallel kernels.

Work is cut into contiguous blocks of clusters and each block is handed to a
thread; numpy releases the GIL inside the heavy array operations. Blocks
never share mutable state and results come back in block order, so the
output does not depend on the worker count.
"""
from __future__ import annotations

import math
import os
from collections.abc import Callable, Sequence
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_workers(workers: int) -> int:
    if workers < 0:
        raise ValueError(f"workers must be >= 0, got {workers}")
    return workers or os.cpu_count() or 1


def split_blocks(
    items: Sequence[T],
    workers: int,
    weights: Sequence[int] | None = None,
    max_weight: int | None = None,
) -> list[list[T]]:
    """Cut ``items`` into at least ``workers`` contiguous blocks (fewer if there are fewer items).

    A block is also closed early once its total weight would exceed
    ``max_weight``; a single heavier item still gets a block of its own.
    """
    if not items:
        return []
    per_block = math.ceil(len(items) / resolve_workers(workers))
    weights = weights if weights is not None else [1] * len(items)
    blocks: list[list[T]] = []
    current: list[T] = []
    current_weight = 0
    for item, weight in zip(items, weights):
        too_heavy = max_weight is not None and current_weight + weight > max_weight
        if current and (len(current) >= per_block or too_heavy):
            blocks.append(current)
            current, current_weight = [], 0
        current.append(item)
        current_weight += weight
    blocks.append(current)
    return blocks


def map_blocks(fn: Callable[[list[T]], R], blocks: Sequence[list[T]], workers: int) -> list[R]:
    workers = resolve_workers(workers)
    if workers == 1 or len(blocks) <= 1:
        return [fn(block) for block in blocks]
    with ThreadPoolExecutor(max_workers=min(workers, len(blocks)), thread_name_prefix="rvk") as pool:
        return list(pool.map(fn, blocks))
