from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator


@dataclass
class StageRecord:
    """Timing of one named pipeline stage."""
    name: str
    seconds: float
    detail: Dict = field(default_factory=dict)


class RunTracker:
    """
    Tracks wall-clock time per pipeline stage (orbits, structure constants,
    reduction, solve, audit). Stages with the same name accumulate.
    """

    def __init__(self):
        self.records: list[StageRecord] = []
        self._stage_stats: Dict[str, Dict] = {}

    @contextmanager
    def stage(self, name: str, **detail) -> Iterator[None]:
        start = time.perf_counter()
        try:
            yield
        finally:
            self.record(name, time.perf_counter() - start, **detail)

    def record(self, name: str, seconds: float, **detail) -> float:
        """Record a stage duration and return the running total for that stage."""
        self.records.append(StageRecord(name=name, seconds=seconds, detail=dict(detail)))
        stats = self._stage_stats.setdefault(name, {"calls": 0, "seconds": 0.0})
        stats["calls"] += 1
        stats["seconds"] += seconds
        return stats["seconds"]

    def get_total_seconds(self) -> float:
        return sum(r.seconds for r in self.records)

    def get_stats(self) -> Dict:
        return {
            "stages": len(self.records),
            "total_seconds": round(self.get_total_seconds(), 4),
            "by_stage": {
                name: {"calls": s["calls"], "seconds": round(s["seconds"], 4)}
                for name, s in self._stage_stats.items()
            },
        }

    def reset(self) -> None:
        self.records.clear()
        self._stage_stats.clear()
