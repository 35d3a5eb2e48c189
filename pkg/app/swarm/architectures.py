"""
Configuration builders for the swarm architectures.

Single-worker expansion and fusion baselines, their parallel variants, the
hierarchical baseline, and the three swarm variants (no multi-way fusion,
no solution sharing, full).
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence

import numpy as np

from app.errors import ContractViolation
from app.fusion.dispatcher import FusionPolicy

from .models import FinalFusion, SwarmConfig, make_schedule

logger = logging.getLogger("swarm.architectures")

DEFAULT_SHARE_EVERY = 4
DEFAULT_PREGEN_COUNT = 250


def partition_label_order(order: Sequence[int], thread_count: int) -> List[List[int]]:
    """Split a label order into thread_count contiguous, disjoint, non-empty blocks."""
    order = [int(label) for label in order]
    if thread_count < 1:
        raise ContractViolation(f"thread_count must be >= 1, got {thread_count}")
    if thread_count > len(order):
        raise ContractViolation(
            f"Cannot split {len(order)} labels into {thread_count} non-empty blocks"
        )
    return [block.tolist() for block in np.array_split(np.asarray(order), thread_count)]


def _sharing_schedule(alpha: int, beta: int, share_every: int):
    if share_every < 0:
        raise ContractViolation(f"share_every must be >= 0, got {share_every}")
    if share_every == 0:
        return [(alpha, beta)]
    if beta == 0:
        return [(alpha, 0)]
    return [(alpha, 0)] * share_every + [(0, beta)]


def cfg_ae(**options) -> SwarmConfig:
    """Alpha-expansion: one worker, one constant-label proposal per step."""
    return SwarmConfig(name="ae", thread_count=1, schedule=make_schedule([(1, 0)]), **options)


def cfg_fm(**options) -> SwarmConfig:
    """Fusion moves: one worker, one proposal per step."""
    return SwarmConfig(name="fm", thread_count=1, schedule=make_schedule([(1, 0)]), **options)


def cfg_pae(thread_count: int, label_order: Sequence[int],
            final_fusion_deadline_ms: Optional[float] = None, **options) -> SwarmConfig:
    """Parallel expansion on disjoint label blocks, then a sequential final fusion."""
    return SwarmConfig(
        name="pae",
        thread_count=thread_count,
        schedule=make_schedule([(1, 0)]),
        final_fusion=FinalFusion.SEQUENTIAL,
        final_fusion_deadline_ms=final_fusion_deadline_ms,
        label_blocks=partition_label_order(label_order, thread_count),
        **options,
    )


def cfg_pfm(thread_count: int, final_fusion_deadline_ms: Optional[float] = None,
            **options) -> SwarmConfig:
    """Independent fusion-move workers, then a sequential final fusion."""
    return SwarmConfig(
        name="pfm",
        thread_count=thread_count,
        schedule=make_schedule([(1, 0)]),
        final_fusion=FinalFusion.SEQUENTIAL,
        final_fusion_deadline_ms=final_fusion_deadline_ms,
        **options,
    )


def cfg_hfm(thread_count: int, pregen_count: int = DEFAULT_PREGEN_COUNT, **options) -> SwarmConfig:
    """Hierarchical fusion: pre-generated proposals fused pairwise up a binary tree."""
    return SwarmConfig(
        name="hfm",
        thread_count=thread_count,
        schedule=make_schedule([(2, 0)]),
        fusion_policy=FusionPolicy.SEQUENTIAL_BINARY,
        hierarchical=True,
        pregen_count=pregen_count,
        **options,
    )


def cfg_sf_mf(thread_count: int, share_every: int = DEFAULT_SHARE_EVERY, **options) -> SwarmConfig:
    """Swarm without multi-way fusion: share_every (1,0) steps, then one (0,1) step."""
    return SwarmConfig(
        name="sf-mf",
        thread_count=thread_count,
        schedule=make_schedule(_sharing_schedule(1, 1, share_every)),
        **options,
    )


def cfg_sf_ss(thread_count: int, alpha: int = 4, **options) -> SwarmConfig:
    """Swarm without solution sharing; all slots are fused once at the end."""
    return SwarmConfig(
        name="sf-ss",
        thread_count=thread_count,
        schedule=make_schedule([(alpha, 0)]),
        final_fusion=FinalFusion.MULTIWAY if thread_count > 1 else FinalFusion.NONE,
        **options,
    )


def cfg_sf(thread_count: int, alpha: int = 3, beta: int = 3,
           share_every: int = DEFAULT_SHARE_EVERY, **options) -> SwarmConfig:
    """
    Full swarm: share_every (alpha,0) steps, then one (0,beta) step.
    share_every=0 uses a single (alpha,beta) step instead.

    Raises:
        ContractViolation: when beta > N - 1
    """
    if beta > thread_count - 1:
        raise ContractViolation(f"beta={beta} exceeds N-1={thread_count - 1} (beta <= N-1)")
    return SwarmConfig(
        name="sf",
        thread_count=thread_count,
        schedule=make_schedule(_sharing_schedule(alpha, beta, share_every)),
        **options,
    )


ARCHITECTURES: Dict[str, Callable[..., SwarmConfig]] = {
    "ae": cfg_ae,
    "fm": cfg_fm,
    "pae": cfg_pae,
    "pfm": cfg_pfm,
    "hfm": cfg_hfm,
    "sf-mf": cfg_sf_mf,
    "sf-ss": cfg_sf_ss,
    "sf": cfg_sf,
}
