#!/usr/bin/env python3
"""In-process metrics for simulation and training runs.

Three kinds of samples share one store, distinguished by name suffix:
timers (`.duration_ms`), counters (`.count`) and plain observations such as
capture times or episode returns. Samples recorded inside Monte-Carlo worker
processes are lost; callers record from the parent once results are back.
"""

import functools
import logging
import threading
import time
from collections import defaultdict, deque
from typing import Any, Callable, Deque, Dict, Iterable

import numpy as np

logger = logging.getLogger(__name__)

MAX_SAMPLES_PER_METRIC = 10_000


class MetricsAggregator:
    """Bounded sample store with per-name summaries"""

    def __init__(self, max_samples: int = MAX_SAMPLES_PER_METRIC):
        self._samples: Dict[str, Deque[float]] = defaultdict(lambda: deque(maxlen=max_samples))
        self._lock = threading.RLock()

    def record_value(self, name: str, value: float) -> None:
        with self._lock:
            self._samples[name].append(float(value))

    def record_values(self, name: str, values: Iterable[float]) -> None:
        with self._lock:
            self._samples[name].extend(float(v) for v in values)

    def record_timer(self, name: str, start_time: float) -> None:
        """Duration since a time.perf_counter() reading, in milliseconds"""
        self.record_value(f"{name}.duration_ms", (time.perf_counter() - start_time) * 1000)

    def record_counter(self, name: str, increment: int = 1) -> None:
        self.record_value(f"{name}.count", increment)

    def get_metrics_summary(self) -> Dict[str, Dict[str, float]]:
        summary = {}
        with self._lock:
            for name, samples in self._samples.items():
                if not samples:
                    continue
                values = np.fromiter(samples, dtype=np.float64, count=len(samples))
                summary[name] = {
                    'count': int(values.size),
                    'total': float(values.sum()),
                    'avg': float(values.mean()),
                    'min': float(values.min()),
                    'max': float(values.max()),
                }
        return summary

    def reset(self) -> None:
        with self._lock:
            self._samples.clear()

    def log_summary(self) -> None:
        for name, stats in sorted(self.get_metrics_summary().items()):
            logger.info(
                f"metric {name}: count={stats['count']} avg={stats['avg']:.3f} "
                f"min={stats['min']:.3f} max={stats['max']:.3f}"
            )


# Process-wide collector, reset by main() at the start of each command
metrics = MetricsAggregator()


def timed_operation(metric_name: str) -> Callable:
    """Decorator recording `{name}.duration_ms` plus success/error counters."""
    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> Any:
            start_time = time.perf_counter()
            try:
                result = func(*args, **kwargs)
            except Exception:
                metrics.record_counter(f"{metric_name}.error")
                raise
            metrics.record_timer(metric_name, start_time)
            metrics.record_counter(f"{metric_name}.success")
            return result
        return wrapper
    return decorator
