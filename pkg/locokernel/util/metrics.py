"""Run metrics: counters and per-stage timers for evaluation runs."""

import time
from collections import defaultdict
from typing import Any, Dict, List


class Metrics:
    """Track evaluation counters and stage latencies."""

    def __init__(self) -> None:
        self.counters: Dict[str, int] = defaultdict(int)
        self.stage_times: Dict[str, List[float]] = defaultdict(list)
        self.start_time = time.perf_counter()

    def increment(self, counter: str, value: int = 1) -> None:
        """Increment a counter."""
        self.counters[counter] += value

    def timer_start(self, name: str) -> float:
        """Start timing an operation."""
        return time.perf_counter()

    def timer_end(self, name: str, start_time: float) -> None:
        """End timing an operation."""
        self.stage_times[name].append(time.perf_counter() - start_time)

        # Keep only recent measurements
        if len(self.stage_times[name]) > 10000:
            self.stage_times[name] = self.stage_times[name][-5000:]

    def get_stage_latencies(self) -> Dict[str, float]:
        """Average latency for each stage, seconds."""
        return {
            stage: sum(times) / len(times)
            for stage, times in self.stage_times.items()
            if times
        }

    def to_dict(self) -> Dict[str, Any]:
        """Convert metrics to dictionary for JSON export."""
        return {
            "runtime_sec": time.perf_counter() - self.start_time,
            "counters": dict(self.counters),
            "stage_latencies": self.get_stage_latencies(),
            "rollouts": self.counters.get("rollouts", 0),
            "falls": self.counters.get("falls", 0),
            "out_of_bounds": self.counters.get("out_of_bounds", 0),
        }
