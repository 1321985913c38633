"""Deterministic fan-out of independent per-prime work items.

Results always come back in input (ascending-prime) order, so reports are
byte-identical no matter how many workers ran.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

T = TypeVar("T")

THREADS_ENV_VAR = "SPLAB_THREADS"


def default_threads() -> int:
    raw = os.environ.get(THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def prime_map(fn: Callable[[int], T], primes: Iterable[int], threads: int = 1) -> list[T]:
    """Apply fn to each prime, preserving input order in the result list."""
    items = list(primes)
    if threads <= 1 or len(items) <= 1:
        return [fn(p) for p in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))
