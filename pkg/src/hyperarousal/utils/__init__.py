"""Utilities package."""

from .file_utils import atomic_write, ensure_dir
from .parallel import parallel_map, resolve_threads
from .performance_profiler import Timer, is_timing_enabled, timed
from .seeding import derive_seed, rng_for

__all__ = [
    "atomic_write",
    "ensure_dir",
    "parallel_map",
    "resolve_threads",
    "Timer",
    "is_timing_enabled",
    "timed",
    "derive_seed",
    "rng_for",
]
