"""Order-preserving per-document parallelism."""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from typing import Callable, Sequence, TypeVar

T = TypeVar("T")
R = TypeVar("R")

JOBS_ENV = "CLIPSE_JOBS"


def default_jobs() -> int:
    value = os.environ.get(JOBS_ENV, "").strip()
    try:
        return max(1, int(value)) if value else 1
    except ValueError:
        return 1


def parallel_map(func: Callable[[T], R], items: Sequence[T], jobs: int = 1) -> list[R]:
    """``list(map(func, items))``, optionally across ``jobs`` worker processes.

    Results come back in input order regardless of the worker count.
    """
    if jobs <= 1 or len(items) < 2:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=min(jobs, len(items))) as pool:
        chunksize = max(1, len(items) // (jobs * 4))
        return list(pool.map(func, items, chunksize=chunksize))
