"""Performance profiling utilities.

Timing instrumentation for the pipeline stages (imputation, training, 5x2cv,
TreeSHAP). Disabled by default; ``--timing`` on the CLI turns it on.
"""

import functools
import time
from contextlib import contextmanager
from typing import Dict, List, Optional

import psutil

from hyperarousal.logger import Logger

# Global flag to control timing analysis
_timing_enabled = False


def enable_timing_analysis():
    """Enable timing analysis globally."""
    global _timing_enabled
    _timing_enabled = True


def disable_timing_analysis():
    """Disable timing analysis globally."""
    global _timing_enabled
    _timing_enabled = False


def is_timing_enabled() -> bool:
    """Check if timing analysis is enabled."""
    return _timing_enabled


def _rss_megabytes() -> float:
    return psutil.Process().memory_info().rss / (1024 * 1024)


class PerformanceStats:
    """Collect and summarize stage timings and memory readings."""

    def __init__(self):
        self.timings: Dict[str, List[float]] = {}
        self.peak_rss_mb: Dict[str, float] = {}

    def record(self, name: str, duration: float, rss_mb: Optional[float] = None):
        """Record a timing measurement.

        Args:
            name: Name of the measured operation
            duration: Duration in seconds
            rss_mb: Resident memory after the operation, in MiB
        """
        self.timings.setdefault(name, []).append(duration)
        if rss_mb is not None:
            self.peak_rss_mb[name] = max(self.peak_rss_mb.get(name, 0.0), rss_mb)

    def get_stats(self, name: str) -> Optional[Dict[str, float]]:
        """Get count/total/mean/min/max statistics for a named operation."""
        values = self.timings.get(name)
        if not values:
            return None
        return {
            "count": len(values),
            "total": sum(values),
            "mean": sum(values) / len(values),
            "min": min(values),
            "max": max(values),
        }

    def print_summary(self):
        """Print a summary of all collected statistics."""
        Logger.print_perf("=" * 60)
        Logger.print_perf("PERFORMANCE SUMMARY")
        Logger.print_perf("=" * 60)
        for name in sorted(self.timings):
            stats = self.get_stats(name)
            if not stats:
                continue
            memory = self.peak_rss_mb.get(name)
            memory_str = f"  rss {memory:.0f} MiB" if memory is not None else ""
            Logger.print_perf(
                f"{name:<28} n={stats['count']:<4} total {stats['total']:.2f}s "
                f"mean {stats['mean']:.2f}s max {stats['max']:.2f}s{memory_str}"
            )
        Logger.print_perf("=" * 60)

    def reset(self):
        """Clear all collected statistics."""
        self.timings.clear()
        self.peak_rss_mb.clear()


# Global performance stats instance
_global_stats = PerformanceStats()


def get_global_stats() -> PerformanceStats:
    """Get the global performance statistics instance."""
    return _global_stats


@contextmanager
def Timer(name: str, log: bool = True, collect_stats: bool = True):
    """Context manager for timing code blocks.

    Usage:
        with Timer("train/gradient_boost"):
            model = train(spec, data, seed)
    """
    if not _timing_enabled:
        yield
        return

    start = time.perf_counter()
    try:
        yield
    finally:
        elapsed = time.perf_counter() - start
        rss = _rss_megabytes()
        if log:
            Logger.print_perf(f"{name}: {elapsed:.2f}s (rss {rss:.0f} MiB)")
        if collect_stats:
            _global_stats.record(name, elapsed, rss)


def timed(name: Optional[str] = None, log: bool = False, collect_stats: bool = True):
    """Decorator for timing function execution when timing is enabled.

    Usage:
        @timed()
        def impute_series(values, cfg):
            ...
    """

    def decorator(func):
        operation_name = name or func.__qualname__

        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            if not _timing_enabled:
                return func(*args, **kwargs)
            with Timer(operation_name, log=log, collect_stats=collect_stats):
                return func(*args, **kwargs)

        return wrapper

    return decorator
