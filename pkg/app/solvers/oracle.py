"""
Exhaustive-search ground truth for tiny instances.

Energies come from evaluate_many, the same code path as evaluate.
Enumeration is lexicographic (variable 0 most significant), so the first
minimum found is the lexicographically smallest optimal labeling.
"""
import logging
from typing import Optional, Tuple

import numpy as np

from app.errors import OracleRefusal
from app.mrf.energy import evaluate, evaluate_many
from app.mrf.models import EnergyModel, Labeling
from config.settings import settings

from .trws import FusionProblem

logger = logging.getLogger("solvers.oracle")

CHUNK_SIZE = 65_536


def _enumerate_min(model: EnergyModel, shape: Tuple[int, ...], to_labels) -> Tuple[np.ndarray, int]:
    """Scan all index tuples of `shape` in lexicographic order; returns (labels, flat index)."""
    total = int(np.prod(shape, dtype=object)) if shape else 1
    best_value = np.inf
    best_labels = None
    best_index = -1
    for start in range(0, total, CHUNK_SIZE):
        flat = np.arange(start, min(start + CHUNK_SIZE, total))
        digits = np.stack(np.unravel_index(flat, shape), axis=1) if shape else np.zeros((1, 0), np.int64)
        labels = to_labels(digits)
        values = evaluate_many(model, labels)
        i = int(np.argmin(values))
        if values[i] < best_value:
            best_value, best_labels, best_index = values[i], labels[i].copy(), start + i
    return best_labels, best_index


def _check_limit(states: int, limit: Optional[int]) -> None:
    limit = settings.oracle_state_limit if limit is None else limit
    if states > limit:
        raise OracleRefusal(states, limit)


def brute_force_map(model: EnergyModel, limit: Optional[int] = None) -> Tuple[Labeling, float]:
    """
    Global minimum by full enumeration of L^V labelings.

    Raises:
        OracleRefusal: when L^V exceeds the state limit
    """
    states = model.label_count ** model.variable_count
    _check_limit(states, limit)
    shape = (model.label_count,) * model.variable_count
    labels, _ = _enumerate_min(model, shape, lambda digits: digits)
    best = Labeling(labels)
    logger.debug(f"Brute-force MAP over {states} labelings")
    return best, evaluate(model, best)


def brute_force_fusion(model: EnergyModel, fp: FusionProblem,
                       limit: Optional[int] = None) -> Tuple[Labeling, float]:
    """
    Minimum over the candidate product space of a fusion problem.

    Raises:
        OracleRefusal: when the product of candidate-list sizes exceeds the limit
    """
    states = fp.product_size()
    _check_limit(states, limit)
    # sort each list so that candidate-index order is label order
    ordered = np.sort(np.where(fp.candidates < 0, np.iinfo(np.int64).max, fp.candidates), axis=1)
    free = np.flatnonzero(fp.counts > 1)
    shape = tuple(int(fp.counts[v]) for v in free)

    def to_labels(digits: np.ndarray) -> np.ndarray:
        # singleton variables stay at their only candidate
        labels = np.repeat(ordered[None, :, 0], digits.shape[0], axis=0)
        labels[:, free] = ordered[free[None, :], digits]
        return labels

    labels, _ = _enumerate_min(model, shape, to_labels)
    best = Labeling(labels)
    return best, evaluate(model, best)
