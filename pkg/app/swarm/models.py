"""
Data models for swarm runs: iteration steps, run configuration and the
final-fusion directive.
"""
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Dict, List, Optional, Sequence, Tuple

from app.errors import ContractViolation
from app.fusion.dispatcher import FusionPolicy
from app.mrf.models import Labeling
from config.settings import settings


@dataclass(frozen=True)
class IterationStep:
    """alpha self-generated proposals and beta peer solutions per fusion."""
    alpha: int
    beta: int

    def __post_init__(self):
        if self.alpha < 0 or self.beta < 0:
            raise ContractViolation(f"alpha and beta must be >= 0, got ({self.alpha}, {self.beta})")
        if self.alpha + self.beta < 1:
            raise ContractViolation("An active step needs alpha + beta >= 1")

    def as_tuple(self) -> Tuple[int, int]:
        return (self.alpha, self.beta)

    def __repr__(self) -> str:
        return f"({self.alpha},{self.beta})"


class FinalFusion(str, Enum):
    """What happens after the workers stop."""
    NONE = "none"
    SEQUENTIAL = "sequential"   # worker 0 fuses the other slots one at a time (alpha=0, beta=1)
    MULTIWAY = "multiway"       # one fusion of all slots


def make_schedule(steps: Sequence[Tuple[int, int]]) -> List[IterationStep]:
    return [IterationStep(alpha, beta) for alpha, beta in steps]


@dataclass
class SwarmConfig:
    """
    One swarm architecture plus its run options.

    Termination: wall-clock budget, stall count across all workers, or
    iterations per worker, whichever comes first. A None disables a criterion.
    """
    name: str
    thread_count: int
    schedule: List[IterationStep]
    fusion_policy: FusionPolicy = FusionPolicy.MULTIWAY
    budget_ms: Optional[float] = None
    stall_limit: Optional[int] = field(default_factory=lambda: settings.stall_limit)
    max_iterations: Optional[int] = None
    seed: int = 0
    deterministic: Optional[bool] = None

    final_fusion: FinalFusion = FinalFusion.NONE
    final_fusion_deadline_ms: Optional[float] = None

    # PAE: one block of the constant-label order per worker
    label_blocks: Optional[List[List[int]]] = None

    # HFM: pre-generated proposals fused up a binary tree
    hierarchical: bool = False
    pregen_count: int = 0

    def __post_init__(self):
        if self.thread_count < 1:
            raise ContractViolation(f"thread_count must be >= 1, got {self.thread_count}")
        if not self.schedule:
            raise ContractViolation("Schedule must not be empty")
        self.schedule = [
            step if isinstance(step, IterationStep) else IterationStep(*step)
            for step in self.schedule
        ]
        for step in self.schedule:
            if step.beta > self.thread_count - 1:
                raise ContractViolation(
                    f"beta={step.beta} exceeds N-1={self.thread_count - 1} (beta <= N-1)"
                )
        if self.label_blocks is not None and len(self.label_blocks) != self.thread_count:
            raise ContractViolation("label_blocks needs one block per worker")
        if self.hierarchical and self.pregen_count < 1:
            raise ContractViolation("Hierarchical fusion needs pregen_count >= 1")
        if self.budget_ms is not None and self.budget_ms < 0:
            raise ContractViolation(f"budget_ms must be >= 0, got {self.budget_ms}")

    @property
    def is_deterministic(self) -> bool:
        return settings.deterministic if self.deterministic is None else self.deterministic

    @property
    def hierarchy_fusions(self) -> int:
        """Internal fusions of the binary tree over pregen_count leaves."""
        return max(self.pregen_count - 1, 0)

    def step(self, iteration: int) -> IterationStep:
        """Step for a 1-based iteration index (the schedule is cyclic)."""
        return self.schedule[(iteration - 1) % len(self.schedule)]

    def effective_deadline_ms(self) -> Optional[float]:
        """When workers hand over to the final fusion."""
        if self.final_fusion == FinalFusion.NONE:
            return self.budget_ms
        if self.final_fusion_deadline_ms is not None:
            return self.final_fusion_deadline_ms
        if self.budget_ms is None:
            return None
        return settings.pfm_deadline_fraction * self.budget_ms

    def with_options(self, **options: Any) -> "SwarmConfig":
        """Copy with run options (budget, seed, stall limit, ...) replaced."""
        return replace(self, **options)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "name": self.name,
            "threads": self.thread_count,
            "schedule": [step.as_tuple() for step in self.schedule],
            "fusion_policy": self.fusion_policy.value,
            "budget_ms": self.budget_ms,
            "stall_limit": self.stall_limit,
            "max_iterations": self.max_iterations,
            "seed": self.seed,
            "final_fusion": self.final_fusion.value,
            "hierarchical": self.hierarchical,
            "pregen_count": self.pregen_count,
        }


@dataclass(frozen=True)
class PoolEntry:
    """Snapshot of one pool slot."""
    labeling: Optional[Labeling]
    energy: float
    version: int
