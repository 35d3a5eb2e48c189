"""
Shared solution pool: one slot per worker, each behind a reader-writer lock.

Readers get snapshot references to immutable labelings, so a later publish
never changes what a reader already holds.
"""
import logging
import threading
from typing import List, Optional, Tuple

import numpy as np

from app.errors import ContractViolation
from app.mrf.energy import evaluate, to_fixed_point
from app.mrf.models import EnergyModel, Labeling
from config.settings import settings

from .models import PoolEntry

logger = logging.getLogger("swarm.pool")


class ReadWriteLock:
    """Many concurrent readers or one writer; writers are not starved."""

    def __init__(self):
        self._cond = threading.Condition(threading.Lock())
        self._readers = 0
        self._writer = False
        self._waiting_writers = 0

    def acquire_read(self) -> None:
        with self._cond:
            while self._writer or self._waiting_writers:
                self._cond.wait()
            self._readers += 1

    def release_read(self) -> None:
        with self._cond:
            self._readers -= 1
            if not self._readers:
                self._cond.notify_all()

    def acquire_write(self) -> None:
        with self._cond:
            self._waiting_writers += 1
            while self._writer or self._readers:
                self._cond.wait()
            self._waiting_writers -= 1
            self._writer = True

    def release_write(self) -> None:
        with self._cond:
            self._writer = False
            self._cond.notify_all()


class _Slot:
    def __init__(self):
        self.lock = ReadWriteLock()
        self.labeling: Optional[Labeling] = None
        self.energy = float("inf")
        self.version = 0


class SolutionPool:
    """
    N slots of (labeling, energy, version).

    Slot i is written only by worker i. Versions start at 0 (empty) and
    increase by one per publish.
    """

    def __init__(self, model: EnergyModel, size: int, debug_checks: Optional[bool] = None):
        if size < 1:
            raise ContractViolation(f"Pool size must be >= 1, got {size}")
        self.model = model
        self.size = size
        self.debug_checks = settings.debug_checks if debug_checks is None else debug_checks
        self._slots = [_Slot() for _ in range(size)]

    def _slot(self, slot: int) -> _Slot:
        if not 0 <= slot < self.size:
            raise ContractViolation(f"Slot {slot} outside 0..{self.size - 1}")
        return self._slots[slot]

    def _check_energy(self, labeling: Labeling, energy: float) -> None:
        if self.debug_checks:
            actual = evaluate(self.model, labeling)
            if to_fixed_point(actual) != to_fixed_point(energy):
                raise ContractViolation(
                    f"Published energy {energy!r} does not match evaluated {actual!r}"
                )

    def publish(self, slot: int, labeling: Labeling, energy: float, owner: int) -> int:
        """
        Replace the slot's solution unconditionally.

        Returns:
            The new slot version

        Raises:
            ContractViolation: when owner is not the slot's worker
        """
        if owner != slot:
            raise ContractViolation(f"Worker {owner} may not write slot {slot}")
        self._check_energy(labeling, energy)
        entry = self._slot(slot)
        entry.lock.acquire_write()
        try:
            entry.labeling = labeling
            entry.energy = float(energy)
            entry.version += 1
            return entry.version
        finally:
            entry.lock.release_write()

    def publish_if_better(self, slot: int, labeling: Labeling, energy: float, owner: int) -> Tuple[int, bool]:
        """
        Replace the slot only when energy is lower (used by tree fusion,
        whose results do not build on the slot's own solution).

        Returns:
            (slot version, whether the slot was replaced)
        """
        if owner != slot:
            raise ContractViolation(f"Worker {owner} may not write slot {slot}")
        self._check_energy(labeling, energy)
        entry = self._slot(slot)
        entry.lock.acquire_write()
        try:
            if entry.labeling is not None and energy >= entry.energy:
                return entry.version, False
            entry.labeling = labeling
            entry.energy = float(energy)
            entry.version += 1
            return entry.version, True
        finally:
            entry.lock.release_write()

    def snapshot(self, slot: int) -> PoolEntry:
        entry = self._slot(slot)
        entry.lock.acquire_read()
        try:
            return PoolEntry(entry.labeling, entry.energy, entry.version)
        finally:
            entry.lock.release_read()

    def snapshots(self) -> List[PoolEntry]:
        return [self.snapshot(slot) for slot in range(self.size)]

    def sample(self, k: int, rng: np.random.Generator, exclude_slot: int) -> List[Labeling]:
        """
        k distinct peer solutions, uniformly without replacement, never the
        caller's own slot.

        Raises:
            ContractViolation: when k > N - 1
        """
        if k < 0 or k > self.size - 1:
            raise ContractViolation(f"Cannot sample {k} peers from a pool of {self.size} (k <= N-1)")
        if k == 0:
            return []
        others = [slot for slot in range(self.size) if slot != exclude_slot]
        chosen = rng.choice(len(others), size=k, replace=False)
        peers = []
        for index in sorted(int(i) for i in chosen):
            labeling = self.snapshot(others[index]).labeling
            if labeling is not None:
                peers.append(labeling)
        return peers

    def best(self) -> Tuple[int, PoolEntry]:
        """(slot, entry) with the lowest energy; ties go to the lowest slot."""
        entries = self.snapshots()
        slot = min(range(self.size), key=lambda i: (entries[i].energy, i))
        return slot, entries[slot]

    def best_energy(self) -> float:
        return self.best()[1].energy
