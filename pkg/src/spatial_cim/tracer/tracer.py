import json
import threading
import time
from collections import defaultdict
from contextlib import contextmanager
from datetime import datetime, timezone
from typing import Any, Dict, List, Optional

import numpy as np


class StageTracer:
    """In-memory record of pipeline stage timings, shared across worker threads"""

    def __init__(self, max_traces: int = 100000):
        self.traces: List[Dict[str, Any]] = []
        self.max_traces = max_traces
        self.lock = threading.Lock()

    def add_trace(self, stage: str, duration_ms: float, seed: Optional[int] = None,
                  status: str = "success", error: Optional[str] = None):
        with self.lock:
            self.traces.append({
                "timestamp": datetime.now(timezone.utc).isoformat(),
                "stage": stage,
                "seed": seed,
                "duration_ms": duration_ms,
                "status": status,
                "error": error,
            })
            # Keep memory bounded
            if len(self.traces) > self.max_traces:
                self.traces = self.traces[-self.max_traces:]

    def get_traces(self, stage: Optional[str] = None, limit: int = 100) -> List[Dict[str, Any]]:
        with self.lock:
            result = self.traces
            if stage:
                result = [t for t in result if t["stage"] == stage]
            return result[-limit:]

    def get_stats(self) -> Dict[str, Dict[str, float]]:
        """Count, error count and duration summary per stage."""
        with self.lock:
            durations = defaultdict(list)
            errors = defaultdict(int)
            for trace in self.traces:
                durations[trace["stage"]].append(trace["duration_ms"])
                if trace["status"] == "error":
                    errors[trace["stage"]] += 1

        stats = {}
        for stage, values in sorted(durations.items()):
            arr = np.asarray(values)
            stats[stage] = {
                "count": int(arr.size),
                "errors": errors[stage],
                "total_ms": float(arr.sum()),
                "mean_ms": float(arr.mean()),
                "max_ms": float(arr.max()),
            }
        return stats

    @contextmanager
    def stage(self, name: str, seed: Optional[int] = None):
        start = time.perf_counter()
        try:
            yield
        except Exception as e:
            self.add_trace(name, (time.perf_counter() - start) * 1000, seed, "error", str(e))
            raise
        self.add_trace(name, (time.perf_counter() - start) * 1000, seed)

    def export_json(self, filepath: str):
        with self.lock:
            with open(filepath, "w", encoding="utf-8") as f:
                json.dump(self.traces, f, indent=2)

    def clear(self):
        with self.lock:
            self.traces = []
