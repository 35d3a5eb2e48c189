"""
Energy evaluation for grid MRFs.

Every energy in the engine (solvers, oracle, pool checks) goes through
evaluate_many, so there is a single definition of the objective.
"""
from typing import Optional

import numpy as np

from app.errors import ContractViolation
from config.settings import settings

from .models import EnergyModel, Labeling


def truncated_abs_pairwise(a, b, sigma_s: float):
    """min(|a - b|, sigma_s); works on scalars and numpy arrays."""
    if sigma_s <= 0:
        raise ContractViolation(f"sigma_s must be positive, got {sigma_s}")
    result = np.minimum(np.abs(np.asarray(a) - np.asarray(b)), sigma_s)
    if np.ndim(result) == 0:
        return float(result)
    return result


def truncated_distance_pairwise(p: np.ndarray, q: np.ndarray, truncation: float) -> np.ndarray:
    """min(||p - q||, truncation) over the last axis."""
    if truncation <= 0:
        raise ContractViolation(f"truncation must be positive, got {truncation}")
    distance = np.linalg.norm(np.asarray(p, dtype=np.float64) - np.asarray(q, dtype=np.float64), axis=-1)
    return np.minimum(distance, truncation)


def check_labeling(model: EnergyModel, labeling: Labeling) -> None:
    """Raise ContractViolation unless labeling is valid for model."""
    if len(labeling) != model.variable_count:
        raise ContractViolation(
            f"Labeling has {len(labeling)} entries, model has {model.variable_count} variables"
        )
    assignment = labeling.assignment
    if assignment.size and (assignment.min() < 0 or assignment.max() >= model.label_count):
        raise ContractViolation(
            f"Labeling uses labels outside 0..{model.label_count - 1}"
        )


def evaluate_many(model: EnergyModel, labelings: np.ndarray) -> np.ndarray:
    """
    Energies of a (B, V) batch of label assignments.

    Unchecked fast path: callers validate ranges first.
    """
    batch = np.asarray(labelings, dtype=np.int64)
    if batch.ndim == 1:
        batch = batch[None, :]
    variables = np.arange(model.variable_count)
    unary = model.unary[variables[None, :], batch].sum(axis=1)
    edges = model.topology.edges
    if edges.shape[0] == 0 or model.pairwise_weight == 0:
        return unary
    edge_ids = np.arange(edges.shape[0])
    theta = model.pairwise.cost(edge_ids[None, :], batch[:, edges[:, 0]], batch[:, edges[:, 1]])
    return unary + model.pairwise_weight * theta.sum(axis=1)


def evaluate(model: EnergyModel, labeling: Labeling) -> float:
    """Total energy of a labeling; pure."""
    check_labeling(model, labeling)
    return float(evaluate_many(model, labeling.assignment[None, :])[0])


def to_fixed_point(value: float, scale: Optional[int] = None) -> int:
    """Round a real cost into the integer domain used by graph cuts."""
    scale = settings.fixed_point_scale if scale is None else scale
    return int(round(value * scale))

