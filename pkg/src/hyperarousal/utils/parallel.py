"""Order-stable parallel map over a bounded thread pool."""

import os
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, TypeVar

T = TypeVar("T")
R = TypeVar("R")


def resolve_threads(threads: Optional[int] = None) -> int:
    """Worker count: explicit value, else HYPERAROUSAL_THREADS, else 1."""
    if threads is None:
        env_value = os.environ.get("HYPERAROUSAL_THREADS")
        if env_value:
            try:
                threads = int(env_value)
            except ValueError:
                threads = 1
        else:
            threads = 1
    return max(1, int(threads))


def parallel_map(
    func: Callable[[T], R], items: Iterable[T], threads: Optional[int] = None
) -> List[R]:
    """Apply ``func`` to every item, returning results in input order.

    Every task must derive its randomness from its own arguments; the worker
    count then only changes scheduling, never results.
    """
    items = list(items)
    workers = min(resolve_threads(threads), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ThreadPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))
