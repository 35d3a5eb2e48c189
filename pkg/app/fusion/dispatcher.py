"""
Fusion dispatcher: routes a fusion request to graph cuts, QPBO or TRW-S.
"""
import logging
from enum import Enum
from typing import Sequence

from app.mrf.energy import check_labeling, evaluate
from app.mrf.models import EnergyModel, Labeling
from app.solvers.binary import binary_fusion_graphcut, is_submodular_fusion
from app.solvers.qpbo import binary_fusion_qpbo
from app.solvers.trws import multiway_fusion

logger = logging.getLogger("fusion.dispatcher")


class FusionPolicy(str, Enum):
    """How to fuse two or more candidates."""
    MULTIWAY = "multiway"
    SEQUENTIAL_BINARY = "sequential_binary"


def binary_fuse(model: EnergyModel, current: Labeling, candidate: Labeling) -> Labeling:
    """Graph cut when the fusion is submodular, QPBO otherwise."""
    if is_submodular_fusion(model, current, candidate):
        logger.debug("Routing binary fusion to graph cut")
        return binary_fusion_graphcut(model, current, candidate)
    logger.debug("Routing binary fusion to QPBO")
    return binary_fusion_qpbo(model, current, candidate)


def fuse(
    model: EnergyModel,
    current: Labeling,
    candidates: Sequence[Labeling],
    policy: FusionPolicy = FusionPolicy.MULTIWAY,
) -> Labeling:
    """
    Fuse current with candidate labelings.

    0 candidates returns current; 1 candidate is a binary fusion; 2 or more
    use TRW-S unless the policy asks for successive binary fusions in
    candidate order. The result is never worse than current.
    """
    check_labeling(model, current)
    for candidate in candidates:
        check_labeling(model, candidate)

    if not candidates:
        return current
    if len(candidates) == 1:
        result = binary_fuse(model, current, candidates[0])
    elif policy == FusionPolicy.SEQUENTIAL_BINARY:
        result = current
        for candidate in candidates:
            result = binary_fuse(model, result, candidate)
    else:
        result = multiway_fusion(model, current, candidates)

    if result is not current and evaluate(model, result) > evaluate(model, current):
        logger.warning("Fusion result worse than current; keeping current")
        return current
    return result
