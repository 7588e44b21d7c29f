"""Deterministic restart fan-out.

Every restart draws from its own generator spawned off the configured seed, so the
aggregate does not depend on how restarts are scheduled across workers.
"""

import logging
from collections.abc import Callable
from concurrent.futures import ThreadPoolExecutor
from typing import TypeVar

import numpy as np

log = logging.getLogger(__name__)

T = TypeVar("T")


def restart_generators(seed: int, count: int, stream: int = 0) -> list[np.random.Generator]:
    """`count` independent generators; `stream` separates engines sharing one seed."""
    root = np.random.SeedSequence([seed, stream])
    return [np.random.default_rng(child) for child in root.spawn(count)]


def run_restarts(
    fn: Callable[[int, np.random.Generator], T],
    seed: int,
    count: int,
    workers: int = 1,
    stream: int = 0,
) -> list[T]:
    """Call fn(index, rng) for every restart; results keep restart order."""
    gens = restart_generators(seed, count, stream)
    if workers <= 1 or count <= 1:
        return [fn(i, g) for i, g in enumerate(gens)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, range(count), gens))


def best_of(results: list[T], key: Callable[[T], float]) -> tuple[int, T]:
    """Highest key, ties resolved to the lowest restart index."""
    best_index = 0
    best_value = key(results[0])
    for i, r in enumerate(results[1:], start=1):
        value = key(r)
        if value > best_value:
            best_index, best_value = i, value
    return best_index, results[best_index]
