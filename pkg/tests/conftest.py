"""
Shared fixtures and helpers for the test suite.
"""
import itertools

import numpy as np
import pytest

from app.mrf import (
    EdgeTablePairwise,
    EnergyModel,
    GridTopology,
    LabelTablePairwise,
    LabelUniverse,
    Labeling,
    build_random_mrf,
)


def table_model(unary, table, width, height, weight=1.0, payload=None):
    """Model with a shared label table."""
    unary = np.asarray(unary, dtype=float)
    return EnergyModel(
        topology=GridTopology(width, height),
        labels=LabelUniverse(unary.shape[1], payload=payload),
        unary=unary,
        pairwise=LabelTablePairwise(np.asarray(table, dtype=float)),
        pairwise_weight=weight,
    )


def abs_table(label_count):
    labels = np.arange(label_count)
    return np.abs(labels[:, None] - labels[None, :]).astype(float)


def hand_energy(model, labeling):
    """Term-by-term energy, independent of the vectorized evaluator."""
    total = 0.0
    for v in range(model.variable_count):
        total += model.unary_cost(v, labeling[v])
    for e, (u, v) in enumerate(model.topology.edges.tolist()):
        total += model.pairwise_weight * model.pairwise_cost(e, labeling[u], labeling[v])
    return total


def all_labelings(model):
    for labels in itertools.product(range(model.label_count), repeat=model.variable_count):
        yield Labeling.from_list(labels)


def random_labeling_list(model, count, seed):
    rng = np.random.default_rng(seed)
    return [
        Labeling(rng.integers(0, model.label_count, size=model.variable_count))
        for _ in range(count)
    ]


@pytest.fixture
def two_pixel_model():
    """1x2 grid, unary u0=[0,5], u1=[3,1], |a-b| with lambda 1."""
    return table_model([[0, 5], [3, 1]], abs_table(2), width=2, height=1)


@pytest.fixture
def frustrated_pair_model():
    """Two variables, zero unary, theta(0,0)=theta(1,1)=1, theta(0,1)=theta(1,0)=0."""
    return EnergyModel(
        topology=GridTopology(2, 1),
        labels=LabelUniverse(2),
        unary=np.zeros((2, 2)),
        pairwise=EdgeTablePairwise(np.array([[[1.0, 0.0], [0.0, 1.0]]])),
    )


@pytest.fixture
def submodular_3x3():
    return build_random_mrf(3, 3, 3, submodular=True, seed=11)


@pytest.fixture
def nonsubmodular_2x3():
    return build_random_mrf(3, 2, 3, submodular=False, seed=13)
