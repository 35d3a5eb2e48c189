"""
Data models for grid MRF problems.

Defines the grid topology, the label universe, pairwise cost families,
the energy model and the labeling type exchanged between workers.
"""
from abc import ABC, abstractmethod
from dataclasses import dataclass, field
from functools import cached_property
from typing import Any, Dict, List, Optional, Sequence

import numpy as np
from scipy.spatial import cKDTree

from app.errors import ContractViolation


def _frozen_array(values: Any, dtype: Any) -> np.ndarray:
    """Copy values into a read-only array."""
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


@dataclass(frozen=True)
class GridTopology:
    """
    4-connected pixel grid.

    Variables are numbered row-major. Horizontal edges come first
    (id = row * (width - 1) + col), then vertical edges
    (id = H_count + row * width + col).
    """
    width: int
    height: int

    def __post_init__(self):
        if self.width < 1 or self.height < 1:
            raise ContractViolation(
                f"Grid must be at least 1x1, got {self.width}x{self.height}"
            )

    @property
    def variable_count(self) -> int:
        return self.width * self.height

    @property
    def horizontal_edge_count(self) -> int:
        return self.height * (self.width - 1)

    @property
    def vertical_edge_count(self) -> int:
        return self.width * (self.height - 1)

    @property
    def edge_count(self) -> int:
        return self.horizontal_edge_count + self.vertical_edge_count

    @cached_property
    def edges(self) -> np.ndarray:
        """(E, 2) array of undirected neighbor pairs (u < v)."""
        grid = np.arange(self.variable_count, dtype=np.int64).reshape(
            self.height, self.width
        )
        horizontal = np.stack(
            [grid[:, :-1].ravel(), grid[:, 1:].ravel()], axis=1
        )
        vertical = np.stack(
            [grid[:-1, :].ravel(), grid[1:, :].ravel()], axis=1
        )
        edges = np.concatenate([horizontal, vertical]).astype(np.int64)
        edges.setflags(write=False)
        return edges

    def index(self, row: int, col: int) -> int:
        """Variable index of a grid cell."""
        return row * self.width + col

    def coords(self, variable: int) -> tuple:
        """(row, col) of a variable index."""
        return divmod(variable, self.width)


@dataclass(frozen=True, eq=False)
class LabelUniverse:
    """
    Dense label set 0..L-1 with an optional payload per label.

    Payloads are scalars (disparities) or 2D vectors (flow in pixels).
    """
    count: int
    payload: Optional[np.ndarray] = None

    def __post_init__(self):
        if self.count < 2:
            raise ContractViolation(f"Label universe needs at least 2 labels, got {self.count}")
        if self.payload is not None:
            payload = _frozen_array(self.payload, np.float64)
            if payload.shape[0] != self.count:
                raise ContractViolation(
                    f"Payload has {payload.shape[0]} entries for {self.count} labels"
                )
            object.__setattr__(self, "payload", payload)

    @property
    def has_vector_payload(self) -> bool:
        """True for 2D flow-vector payloads."""
        return (
            self.payload is not None
            and self.payload.ndim == 2
            and self.payload.shape[1] == 2
        )

    @cached_property
    def _payload_tree(self) -> cKDTree:
        return cKDTree(self.payload)

    def snap(self, vectors: np.ndarray) -> np.ndarray:
        """Nearest label index (Euclidean) for each payload vector."""
        if not self.has_vector_payload:
            raise ContractViolation("Snapping requires 2D vector label payloads")
        _, indices = self._payload_tree.query(np.asarray(vectors, dtype=np.float64))
        return np.asarray(indices, dtype=np.int64)


# ============================================================================
# Pairwise cost families
# ============================================================================

class PairwiseTerm(ABC):
    """Pairwise cost theta(edge, a, b), vectorized over broadcastable arrays."""

    @abstractmethod
    def cost(self, edge_ids: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """Unweighted cost for edges and label pairs (broadcasting)."""

    @abstractmethod
    def validate(self, topology: GridTopology, labels: LabelUniverse) -> None:
        """Raise ContractViolation when the term does not fit the model."""


@dataclass(frozen=True, eq=False)
class LabelTablePairwise(PairwiseTerm):
    """Shared L x L label-distance table, optionally scaled per edge."""
    table: np.ndarray
    edge_weights: Optional[np.ndarray] = None
    kind: str = "table"

    def __post_init__(self):
        object.__setattr__(self, "table", _frozen_array(self.table, np.float64))
        if self.edge_weights is not None:
            object.__setattr__(
                self, "edge_weights", _frozen_array(self.edge_weights, np.float64)
            )

    def cost(self, edge_ids, a, b):
        values = self.table[a, b]
        if self.edge_weights is not None:
            values = values * self.edge_weights[edge_ids]
        return values

    def validate(self, topology, labels):
        if self.table.shape != (labels.count, labels.count):
            raise ContractViolation(
                f"Pairwise table shape {self.table.shape} does not match {labels.count} labels"
            )
        if not np.all(np.isfinite(self.table)):
            raise ContractViolation("Pairwise table has non-finite costs")
        if self.edge_weights is not None and self.edge_weights.shape != (topology.edge_count,):
            raise ContractViolation("Edge weights must have one entry per edge")


@dataclass(frozen=True, eq=False)
class EdgeTablePairwise(PairwiseTerm):
    """Independent L x L table per edge."""
    tables: np.ndarray
    kind: str = "edge_tables"

    def __post_init__(self):
        object.__setattr__(self, "tables", _frozen_array(self.tables, np.float64))

    def cost(self, edge_ids, a, b):
        return self.tables[edge_ids, a, b]

    def validate(self, topology, labels):
        expected = (topology.edge_count, labels.count, labels.count)
        if self.tables.shape != expected:
            raise ContractViolation(
                f"Edge tables shape {self.tables.shape} does not match {expected}"
            )
        if not np.all(np.isfinite(self.tables)):
            raise ContractViolation("Edge tables have non-finite costs")


# ============================================================================
# Energy model and labeling
# ============================================================================

@dataclass(frozen=True, eq=False)
class EnergyModel:
    """
    Grid MRF energy: sum of unary costs plus lambda times pairwise costs.

    Immutable after construction; safe to share across worker threads.
    """
    topology: GridTopology
    labels: LabelUniverse
    unary: np.ndarray
    pairwise: PairwiseTerm
    pairwise_weight: float = 1.0
    name: str = "mrf"
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        unary = _frozen_array(self.unary, np.float64)
        expected = (self.topology.variable_count, self.labels.count)
        if unary.shape != expected:
            raise ContractViolation(f"Unary shape {unary.shape} does not match {expected}")
        if not np.all(np.isfinite(unary)):
            raise ContractViolation("Unary costs must be finite")
        if not np.isfinite(self.pairwise_weight):
            raise ContractViolation("Pairwise weight must be finite")
        self.pairwise.validate(self.topology, self.labels)
        object.__setattr__(self, "unary", unary)

    @property
    def variable_count(self) -> int:
        return self.topology.variable_count

    @property
    def label_count(self) -> int:
        return self.labels.count

    def unary_cost(self, variable: int, label: int) -> float:
        return float(self.unary[variable, label])

    def pairwise_cost(self, edge: int, a: int, b: int) -> float:
        """Unweighted pairwise cost theta(edge, a, b)."""
        return float(self.pairwise.cost(np.int64(edge), np.int64(a), np.int64(b)))

    def edge_costs(self, edge_ids: np.ndarray, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        """lambda * theta for broadcastable edge/label arrays."""
        return self.pairwise_weight * self.pairwise.cost(edge_ids, a, b)

    def to_dict(self) -> Dict[str, Any]:
        """Summary for logs and bench metadata."""
        return {
            "name": self.name,
            "width": self.topology.width,
            "height": self.topology.height,
            "labels": self.labels.count,
            "pairwise_weight": self.pairwise_weight,
            **self.metadata,
        }


@dataclass(frozen=True, eq=False)
class Labeling:
    """One label index per grid variable (row-major), read-only."""
    assignment: np.ndarray

    def __post_init__(self):
        assignment = _frozen_array(self.assignment, np.int64)
        if assignment.ndim != 1:
            assignment = assignment.reshape(-1)
        object.__setattr__(self, "assignment", assignment)

    @classmethod
    def constant(cls, variable_count: int, label: int) -> "Labeling":
        return cls(np.full(variable_count, label, dtype=np.int64))

    @classmethod
    def from_list(cls, labels: Sequence[int]) -> "Labeling":
        return cls(np.asarray(labels, dtype=np.int64))

    def __len__(self) -> int:
        return int(self.assignment.shape[0])

    def __getitem__(self, variable: int) -> int:
        return int(self.assignment[variable])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Labeling):
            return NotImplemented
        return np.array_equal(self.assignment, other.assignment)

    def __hash__(self) -> int:
        return hash(self.assignment.tobytes())

    def as_grid(self, topology: GridTopology) -> np.ndarray:
        return self.assignment.reshape(topology.height, topology.width)

    def to_list(self) -> List[int]:
        return [int(v) for v in self.assignment]

    def __repr__(self) -> str:
        if len(self) <= 12:
            return f"Labeling({self.to_list()})"
        return f"Labeling(<{len(self)} variables>)"
