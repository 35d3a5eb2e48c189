"""
Append-only energy trace shared by all workers of a run.
"""
import threading
import time
from dataclasses import asdict, dataclass
from typing import Dict, List, Optional

import pandas as pd

TRACE_COLUMNS = ["elapsed_ms", "worker", "iteration", "energy", "best_energy"]


@dataclass(frozen=True)
class TraceRecord:
    elapsed_ms: float
    worker: int
    iteration: int
    energy: float
    best_energy: float

    def to_dict(self) -> Dict:
        return asdict(self)


class EnergyTrace:
    """
    Serialized appends of (elapsed ms, worker, iteration, energy, best energy).

    Timestamps come from a monotonic clock read under the trace lock, so
    rows are in time order; best_energy is the running minimum of all
    recorded energies.
    """

    def __init__(self, start: Optional[float] = None):
        self._lock = threading.Lock()
        self._start = time.monotonic() if start is None else start
        self._records: List[TraceRecord] = []
        self._best = float("inf")

    @property
    def start(self) -> float:
        return self._start

    def elapsed_ms(self) -> float:
        return (time.monotonic() - self._start) * 1000.0

    def record(self, worker: int, iteration: int, energy: float) -> bool:
        """Append a row; returns True when it lowered the best energy."""
        with self._lock:
            improved = energy < self._best
            if improved:
                self._best = energy
            self._records.append(
                TraceRecord(self.elapsed_ms(), worker, iteration, float(energy), self._best)
            )
            return improved

    @property
    def best_energy(self) -> float:
        with self._lock:
            return self._best

    @property
    def records(self) -> List[TraceRecord]:
        with self._lock:
            return list(self._records)

    def __len__(self) -> int:
        with self._lock:
            return len(self._records)

    def fusion_count(self) -> int:
        """Rows after initialization (iteration > 0)."""
        return sum(1 for r in self.records if r.iteration > 0)

    def worker_energies(self, worker: int) -> List[float]:
        return [r.energy for r in self.records if r.worker == worker]

    def to_frame(self) -> pd.DataFrame:
        rows = [r.to_dict() for r in self.records]
        return pd.DataFrame(rows, columns=TRACE_COLUMNS)
