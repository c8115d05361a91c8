#!/usr/bin/env python3
"""
Performance utilities for the ConPT percolation toolkit.

This module provides tools for:
- Bounded memoization of expensive numerical sub-results (LRU eviction)
- Performance monitoring and metrics collection
- Parallel execution of independent work items

Architecture Overview:
    Memo caches are created per computation (for example one per top-level
    star-mesh solve) so that cached values never leak between solves and
    results stay deterministic. The performance monitor is a process-wide
    instance shared by the @timed decorator.

Thread Safety:
    MemoCache and PerformanceMonitor are protected by reentrant locks and may
    be shared between threads.

Parallelism:
    parallel_map() dispatches a top-level function over a list of items with
    a process pool when more than one worker is requested. The worker count
    defaults to the CONPT_THREADS environment variable. Results are returned
    in input order, so callers that sort before aggregating are independent
    of the schedule.

Usage Examples:
    @timed("star_mesh.solve")
    def solve(star):
        ...

    cache = MemoCache(max_size=4096)
    value = cache.get(key)
    if value is None:
        value = compute()
        cache.put(key, value)

    results = parallel_map(run_one, items, workers=worker_count())

Anti-Patterns:
    - Don't share a MemoCache across solves with different tolerances
    - Don't pass lambdas or closures to parallel_map with workers > 1
      (they cannot be pickled)
"""

import os
import time
import functools
import threading
from collections import OrderedDict
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, Hashable, Iterable, List, Optional, TypeVar

from modules import config

F = TypeVar('F', bound=Callable[..., Any])
T = TypeVar('T')
R = TypeVar('R')


class MemoCache:
    """
    Thread-safe LRU cache for memoizing numerical sub-results.

    Keys must be hashable (tuples of floats are typical). Entries never
    expire; the least recently used entry is evicted once max_size is
    exceeded.

    Attributes:
        max_size: Maximum number of entries kept
        hits: Number of successful lookups
        misses: Number of failed lookups

    Example:
        >>> cache = MemoCache(max_size=2)
        >>> cache.put(("a",), 1.0)
        >>> cache.get(("a",))
        1.0
    """

    def __init__(self, max_size: int = config.MAX_CACHE_SIZE):
        self.max_size = max_size
        self.cache: "OrderedDict[Hashable, Any]" = OrderedDict()
        self.lock = threading.RLock()
        self.hits = 0
        self.misses = 0

    def get(self, key: Hashable) -> Optional[Any]:
        """
        Get value from cache, refreshing its LRU position.

        Returns:
            Cached value if present, None otherwise
        """
        with self.lock:
            if key not in self.cache:
                self.misses += 1
                return None
            self.cache.move_to_end(key)
            self.hits += 1
            return self.cache[key]

    def put(self, key: Hashable, value: Any) -> None:
        """
        Put value into cache, evicting the oldest entries beyond max_size.
        """
        with self.lock:
            if key in self.cache:
                del self.cache[key]
            self.cache[key] = value
            while len(self.cache) > self.max_size:
                self.cache.popitem(last=False)

    def clear(self) -> None:
        """Clear all cache entries."""
        with self.lock:
            self.cache.clear()
            self.hits = 0
            self.misses = 0

    def size(self) -> int:
        """Get current cache size."""
        with self.lock:
            return len(self.cache)


class PerformanceMonitor:
    """
    Monitor and track performance metrics for operations.

    Tracks execution times for named operations, computing average,
    minimum and maximum times.

    Metrics Tracked Per Operation:
        - total_time: Cumulative execution time in seconds
        - call_count: Number of times operation was called
        - average_time: Mean execution time (total_time / call_count)
        - min_time: Fastest execution time observed
        - max_time: Slowest execution time observed
    """

    def __init__(self):
        self.metrics: Dict[str, Dict[str, Any]] = {}
        self.lock = threading.RLock()

    def record(self, operation: str, elapsed_time: float) -> None:
        """
        Record one completed execution of an operation.

        Args:
            operation: Operation name
            elapsed_time: Wall time in seconds
        """
        with self.lock:
            metrics = self.metrics.setdefault(operation, {
                'total_time': 0.0,
                'call_count': 0,
                'average_time': 0.0,
                'min_time': float('inf'),
                'max_time': 0.0,
            })
            metrics['call_count'] += 1
            metrics['total_time'] += elapsed_time
            metrics['average_time'] = metrics['total_time'] / metrics['call_count']
            metrics['min_time'] = min(metrics['min_time'], elapsed_time)
            metrics['max_time'] = max(metrics['max_time'], elapsed_time)

    def get_metrics(self, operation: Optional[str] = None) -> Dict[str, Any]:
        """
        Get performance metrics.

        Args:
            operation: Specific operation or None for all

        Returns:
            Copy of the metrics
        """
        with self.lock:
            if operation:
                return dict(self.metrics.get(operation, {}))
            return {op: dict(metrics) for op, metrics in self.metrics.items()}

    def reset_metrics(self, operation: Optional[str] = None) -> None:
        """Reset performance metrics for one operation or all of them."""
        with self.lock:
            if operation:
                self.metrics.pop(operation, None)
            else:
                self.metrics.clear()


# Global instance
_monitor = PerformanceMonitor()


def timed(operation: Optional[str] = None) -> Callable[[F], F]:
    """
    Decorator for timing function execution and collecting performance metrics.

    Args:
        operation: Custom operation name for metrics aggregation.
                   Defaults to the fully qualified function name.

    Error Handling:
        The elapsed time is recorded even if the function raises.

    Example:
        @timed("reduction.run")
        def run_once(...):
            ...

        stats = get_performance_stats()
        print(stats["reduction.run"]["average_time"])
    """
    def decorator(func: F) -> F:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            op_name = operation or f"{func.__module__}.{func.__name__}"
            start = time.perf_counter()
            try:
                return func(*args, **kwargs)
            finally:
                _monitor.record(op_name, time.perf_counter() - start)

        return wrapper  # type: ignore

    return decorator


def worker_count(requested: Optional[int] = None) -> int:
    """
    Resolve the number of parallel workers.

    An explicit request wins; otherwise CONPT_THREADS is read. Invalid or
    missing values fall back to a single worker.
    """
    if requested is not None:
        return max(1, int(requested))
    raw = os.environ.get(config.THREADS_ENV_VAR, "")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def parallel_map(func: Callable[[T], R], items: Iterable[T],
                 workers: Optional[int] = None) -> List[R]:
    """
    Apply func to every item, possibly in worker processes.

    Results are returned in input order whatever the schedule.

    Args:
        func: Top-level (picklable) function of one argument
        items: Work items
        workers: Worker count, defaults to worker_count()

    Returns:
        List of results in the order of items
    """
    items = list(items)
    workers = min(worker_count(workers), max(1, len(items)))
    if workers == 1:
        return [func(item) for item in items]
    with ProcessPoolExecutor(max_workers=workers) as executor:
        return list(executor.map(func, items))


def get_performance_stats() -> Dict[str, Any]:
    """
    Get all collected performance statistics.

    Returns:
        Nested dictionary mapping operation name to total_time, call_count,
        average_time, min_time and max_time.
    """
    return _monitor.get_metrics()


def reset_performance_stats() -> None:
    """Reset all performance statistics."""
    _monitor.reset_metrics()
