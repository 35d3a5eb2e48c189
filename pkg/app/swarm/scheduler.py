"""
Swarm scheduler.

N workers each loop over their cyclic (alpha, beta) schedule: generate
alpha proposals, sample beta peer solutions from the pool, fuse, publish
and trace. Workers run asynchronously on a thread pool, or in round-robin
lock-step when the run is deterministic.
"""
import logging
import threading
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np

from app.errors import ContractViolation
from app.fusion.dispatcher import FusionPolicy, fuse
from app.mrf.builders import random_labeling
from app.mrf.energy import check_labeling, evaluate
from app.mrf.models import EnergyModel, Labeling
from app.proposals.generators import ConstantLabelGenerator, ProposalGenerator

from .models import FinalFusion, SwarmConfig
from .pool import SolutionPool
from .trace import EnergyTrace

logger = logging.getLogger("swarm.scheduler")

GeneratorSource = Union[Callable[[int], ProposalGenerator], Sequence[ProposalGenerator], None]


def _worker_generators(config: SwarmConfig, generators: GeneratorSource) -> List[ProposalGenerator]:
    if config.label_blocks is not None:
        return [ConstantLabelGenerator(block) for block in config.label_blocks]
    if generators is None:
        raise ContractViolation(f"Architecture '{config.name}' needs proposal generators")
    if callable(generators):
        return [generators(worker) for worker in range(config.thread_count)]
    generators = list(generators)
    if len(generators) != config.thread_count:
        raise ContractViolation(
            f"Got {len(generators)} generators for {config.thread_count} workers"
        )
    return generators


class SwarmRun:
    """State of one run: pool, trace, per-worker generators and rngs."""

    def __init__(
        self,
        config: SwarmConfig,
        model: EnergyModel,
        generators: GeneratorSource,
        initial: Optional[Sequence[Labeling]] = None,
    ):
        self.config = config
        self.model = model
        self.n = config.thread_count
        self.generators = _worker_generators(config, generators)
        self.rngs = [
            np.random.default_rng(child)
            for child in np.random.SeedSequence(config.seed).spawn(self.n)
        ]
        if initial is not None:
            initial = list(initial)
            if len(initial) != self.n:
                raise ContractViolation(f"Got {len(initial)} initial labelings for {self.n} workers")
            for labeling in initial:
                check_labeling(model, labeling)
        self.initial = initial

        self.pool = SolutionPool(model, self.n)
        self.trace = EnergyTrace()
        self.deadline_ms = config.effective_deadline_ms()
        self._stop = threading.Event()
        self._stall_lock = threading.Lock()
        self._stall = 0
        self._iterations = [0] * self.n

    # ------------------------------------------------------------------
    # Termination
    # ------------------------------------------------------------------

    def _within(self, limit_ms: Optional[float]) -> bool:
        return limit_ms is None or self.trace.elapsed_ms() < limit_ms

    def _may_continue(self, worker: int) -> bool:
        config = self.config
        if self._stop.is_set():
            return False
        if not self._within(self.deadline_ms) or not self._within(config.budget_ms):
            return False
        if config.max_iterations is not None and self._iterations[worker] >= config.max_iterations:
            return False
        if config.stall_limit is not None:
            with self._stall_lock:
                if self._stall >= config.stall_limit:
                    return False
        return True

    def _record(self, worker: int, iteration: int, energy: float) -> None:
        improved = self.trace.record(worker, iteration, energy)
        with self._stall_lock:
            self._stall = 0 if improved else self._stall + 1

    # ------------------------------------------------------------------
    # Workers
    # ------------------------------------------------------------------

    def initialize(self) -> None:
        for worker in range(self.n):
            if self.initial is not None:
                labeling = self.initial[worker]
            else:
                labeling = random_labeling(self.model, self.rngs[worker])
            energy = evaluate(self.model, labeling)
            self.pool.publish(worker, labeling, energy, owner=worker)
            self.trace.record(worker, 0, energy)

    def step(self, worker: int) -> float:
        """One fusion step of a worker; returns its new energy."""
        self._iterations[worker] += 1
        iteration = self._iterations[worker]
        step = self.config.step(iteration)
        rng = self.rngs[worker]
        current = self.pool.snapshot(worker).labeling

        proposals = [
            self.generators[worker].generate(self.model, current, rng)
            for _ in range(step.alpha)
        ]
        peers = self.pool.sample(step.beta, rng, exclude_slot=worker)
        result = fuse(self.model, current, proposals + peers, self.config.fusion_policy)
        energy = evaluate(self.model, result)
        self.pool.publish(worker, result, energy, owner=worker)
        self._record(worker, iteration, energy)
        return energy

    def _worker_loop(self, worker: int) -> None:
        try:
            while self._may_continue(worker):
                self.step(worker)
        except BaseException:
            self._stop.set()
            raise

    def run_workers(self) -> None:
        if self.config.is_deterministic:
            while True:
                progressed = False
                for worker in range(self.n):
                    if self._may_continue(worker):
                        self.step(worker)
                        progressed = True
                if not progressed:
                    break
            return
        with ThreadPoolExecutor(max_workers=self.n, thread_name_prefix="swarm-worker") as executor:
            futures = [executor.submit(self._worker_loop, worker) for worker in range(self.n)]
            for future in futures:
                future.result()

    # ------------------------------------------------------------------
    # Final fusion
    # ------------------------------------------------------------------

    def final_fusion(self) -> None:
        """Worker 0 fuses the other slots' solutions into its own."""
        directive = self.config.final_fusion
        if directive == FinalFusion.NONE or self.n < 2:
            return
        logger.info(f"Final {directive.value} fusion over {self.n} solutions")
        if directive == FinalFusion.SEQUENTIAL:
            for peer in range(1, self.n):
                if not self._within(self.config.budget_ms):
                    return
                self._final_step([self.pool.snapshot(peer).labeling], FusionPolicy.SEQUENTIAL_BINARY)
        elif self._within(self.config.budget_ms):
            peers = [self.pool.snapshot(peer).labeling for peer in range(1, self.n)]
            self._final_step(peers, FusionPolicy.MULTIWAY)

    def _final_step(self, peers: List[Labeling], policy: FusionPolicy) -> None:
        self._iterations[0] += 1
        current = self.pool.snapshot(0).labeling
        result = fuse(self.model, current, peers, policy)
        energy = evaluate(self.model, result)
        self.pool.publish(0, result, energy, owner=0)
        self.trace.record(0, self._iterations[0], energy)

    # ------------------------------------------------------------------
    # Hierarchical fusion
    # ------------------------------------------------------------------

    def run_hierarchy(self) -> None:
        """
        Pre-generate pregen_count proposals, then fuse pairs level by level.
        Node j of a level is fused by worker j mod N; an odd node moves up unchanged.
        """
        budget = self.config.budget_ms
        level: List[Labeling] = []
        for index in range(self.config.pregen_count):
            if not self._within(budget):
                return
            worker = index % self.n
            current = self.pool.snapshot(worker).labeling
            level.append(self.generators[worker].generate(self.model, current, self.rngs[worker]))

        depth = 0
        while len(level) > 1 and self._within(budget):
            depth += 1
            pairs = [(level[i], level[i + 1]) for i in range(0, len(level) - 1, 2)]
            results: List[Optional[Labeling]] = [None] * len(pairs)

            def fuse_nodes(worker: int) -> None:
                for node in range(worker, len(pairs), self.n):
                    left, right = pairs[node]
                    if not self._within(budget):
                        results[node] = left
                        continue
                    fused = fuse(self.model, left, [right], self.config.fusion_policy)
                    results[node] = fused
                    self._publish_tree_result(worker, fused)

            if self.config.is_deterministic:
                for worker in range(self.n):
                    fuse_nodes(worker)
            else:
                with ThreadPoolExecutor(max_workers=self.n, thread_name_prefix="swarm-tree") as executor:
                    for future in [executor.submit(fuse_nodes, w) for w in range(self.n)]:
                        future.result()

            carry = [level[-1]] if len(level) % 2 else []
            level = list(results) + carry
            logger.debug(f"Hierarchy level {depth}: {len(level)} nodes remain")

    def _publish_tree_result(self, worker: int, labeling: Labeling) -> None:
        energy = evaluate(self.model, labeling)
        self.pool.publish_if_better(worker, labeling, energy, owner=worker)
        self._iterations[worker] += 1
        self.trace.record(worker, self._iterations[worker], self.pool.snapshot(worker).energy)

    # ------------------------------------------------------------------

    def run(self) -> Tuple[Labeling, EnergyTrace]:
        config = self.config
        logger.info(
            f"Starting {config.name}: N={self.n}, schedule={config.schedule}, "
            f"budget={config.budget_ms}ms, seed={config.seed}, "
            f"{'deterministic' if config.is_deterministic else 'asynchronous'}"
        )
        self.initialize()
        if config.hierarchical:
            self.run_hierarchy()
        else:
            self.run_workers()
            self.final_fusion()
        slot, entry = self.pool.best()
        logger.info(
            f"Finished {config.name}: best energy {entry.energy:.6f} (slot {slot}), "
            f"{self.trace.fusion_count()} fusions in {self.trace.elapsed_ms():.0f}ms"
        )
        return entry.labeling, self.trace


def run_swarm(
    config: SwarmConfig,
    model: EnergyModel,
    generators: GeneratorSource,
    initial: Optional[Sequence[Labeling]] = None,
) -> Tuple[Labeling, EnergyTrace]:
    """
    Run one swarm to termination.

    Args:
        config: Architecture and run options
        model: Energy to minimize
        generators: Factory worker -> generator, or one generator per worker
        initial: Optional initial labeling per worker (default: uniform random)

    Returns:
        (lowest-energy pool labeling, full trace)
    """
    return SwarmRun(config, model, generators, initial).run()
