"""
Binary fusion energies and exact graph-cut fusion for the submodular case.

A binary fusion picks, per variable, the current label (y = 0) or the
proposal label (y = 1).
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from app.errors import NonSubmodularFusionError
from app.mrf.energy import check_labeling, evaluate
from app.mrf.models import EnergyModel, Labeling
from config.settings import settings

from .maxflow import FlowNetwork, solve_maxflow

logger = logging.getLogger("solvers.binary")


def scale_costs(values: np.ndarray, scale: Optional[int] = None) -> np.ndarray:
    """Fixed-point copy of a cost array (same rounding as to_fixed_point)."""
    scale = settings.fixed_point_scale if scale is None else scale
    return np.rint(np.asarray(values, dtype=np.float64) * scale).astype(np.int64)


@dataclass(frozen=True, eq=False)
class BinaryEnergy:
    """
    Pseudo-boolean energy with per-variable unary pairs and per-edge 2x2 tables.

    E(y) = constant + sum_v unary[v, y_v] + sum_e tables[e, y_u, y_v]
    """
    unary: np.ndarray
    edges: np.ndarray
    tables: np.ndarray
    constant: float = 0.0

    @property
    def variable_count(self) -> int:
        return int(self.unary.shape[0])

    def energy(self, assignment) -> float:
        y = np.asarray(assignment, dtype=np.int64)
        total = self.unary[np.arange(self.variable_count), y].sum()
        if self.edges.shape[0]:
            total += self.tables[
                np.arange(self.edges.shape[0]), y[self.edges[:, 0]], y[self.edges[:, 1]]
            ].sum()
        return float(self.constant + total)

    def submodular_mask(self, scale: Optional[int] = None) -> np.ndarray:
        """Per-edge theta(0,0) + theta(1,1) <= theta(0,1) + theta(1,0), in fixed point."""
        t = scale_costs(self.tables, scale)
        return t[:, 0, 0] + t[:, 1, 1] <= t[:, 0, 1] + t[:, 1, 0]

    def is_submodular(self, scale: Optional[int] = None) -> bool:
        return bool(np.all(self.submodular_mask(scale)))


def build_fusion_energy(model: EnergyModel, current: Labeling, proposal: Labeling) -> BinaryEnergy:
    """Binary energy of choosing between current and proposal at every variable."""
    c = current.assignment
    p = proposal.assignment
    variables = np.arange(model.variable_count)
    unary = np.stack([model.unary[variables, c], model.unary[variables, p]], axis=1)
    edges = model.topology.edges
    u, v = edges[:, 0], edges[:, 1]
    ids = np.arange(edges.shape[0])
    tables = np.empty((edges.shape[0], 2, 2))
    tables[:, 0, 0] = model.edge_costs(ids, c[u], c[v])
    tables[:, 0, 1] = model.edge_costs(ids, c[u], p[v])
    tables[:, 1, 0] = model.edge_costs(ids, p[u], c[v])
    tables[:, 1, 1] = model.edge_costs(ids, p[u], p[v])
    return BinaryEnergy(unary=unary, edges=np.array(edges), tables=tables)


def restrict_energy(energy: BinaryEnergy, free: np.ndarray) -> BinaryEnergy:
    """
    Same energy over the free variables only.

    A variable is fixed when its two choices carry the same label, so its
    unary pair is equal and every table it touches is constant along its
    axis. Edges to fixed neighbours fold into the free variable's unary;
    terms of fixed variables fold into the constant.
    """
    free = np.asarray(free, dtype=bool)
    index = np.full(energy.variable_count, -1, dtype=np.int64)
    index[free] = np.arange(int(free.sum()))
    unary = energy.unary[free].copy()
    constant = energy.constant + float(energy.unary[~free, 0].sum())

    u, v = energy.edges[:, 0], energy.edges[:, 1]
    both = free[u] & free[v]
    only_u = free[u] & ~free[v]
    only_v = ~free[u] & free[v]
    neither = ~free[u] & ~free[v]
    np.add.at(unary, index[u[only_u]], energy.tables[only_u, :, 0])
    np.add.at(unary, index[v[only_v]], energy.tables[only_v, 0, :])
    constant += float(energy.tables[neither, 0, 0].sum())

    edges = np.stack([index[u[both]], index[v[both]]], axis=1)
    return BinaryEnergy(unary=unary, edges=edges, tables=energy.tables[both].copy(), constant=constant)


def differing_variables(current: Labeling, proposal: Labeling) -> np.ndarray:
    return current.assignment != proposal.assignment


def is_submodular_fusion(model: EnergyModel, current: Labeling, proposal: Labeling) -> bool:
    """
    True iff every edge satisfies
    theta(c_u, c_v) + theta(p_u, p_v) <= theta(c_u, p_v) + theta(p_u, c_v).
    """
    check_labeling(model, current)
    check_labeling(model, proposal)
    return build_fusion_energy(model, current, proposal).is_submodular()


def minimize_submodular(energy: BinaryEnergy, scale: Optional[int] = None) -> np.ndarray:
    """
    Exact minimizer of a submodular binary energy by one s-t min cut.

    Each edge table is split as
    A + (C - A) y_u + (D - C) y_v + (B + C - A - D) (1 - y_u) y_v,
    and y_v = 1 exactly when v ends on the sink side.
    """
    if not energy.is_submodular(scale):
        raise NonSubmodularFusionError("Binary energy violates submodularity on at least one edge")
    n = energy.variable_count
    unary = scale_costs(energy.unary, scale)
    tables = scale_costs(energy.tables, scale)
    linear = unary[:, 1] - unary[:, 0]
    a = tables[:, 0, 0]
    b = tables[:, 0, 1]
    c = tables[:, 1, 0]
    d = tables[:, 1, 1]
    u, v = energy.edges[:, 0], energy.edges[:, 1]
    np.add.at(linear, u, c - a)
    np.add.at(linear, v, d - c)
    coupling = b + c - a - d

    net = FlowNetwork(n)
    for node, coefficient in enumerate(linear.tolist()):
        if coefficient > 0:
            net.add_terminal_arcs(node, coefficient, 0)
        elif coefficient < 0:
            net.add_terminal_arcs(node, 0, -coefficient)
    for tail, head, weight in zip(u.tolist(), v.tolist(), coupling.tolist()):
        if weight > 0:
            net.add_arc(tail, head, weight)
    _, cut = solve_maxflow(net)
    return (~cut.source_side).astype(np.int64)


def binary_fusion_graphcut(model: EnergyModel, current: Labeling, proposal: Labeling) -> Labeling:
    """
    Optimal labeling in the product space {current_v, proposal_v}.

    Raises:
        NonSubmodularFusionError: when the fusion energy is not submodular
    """
    check_labeling(model, current)
    check_labeling(model, proposal)
    if current == proposal:
        return current
    free = differing_variables(current, proposal)
    energy = restrict_energy(build_fusion_energy(model, current, proposal), free)
    y = np.zeros(model.variable_count, dtype=np.int64)
    y[free] = minimize_submodular(energy)
    result = Labeling(np.where(y == 1, proposal.assignment, current.assignment))

    # the cut is exact in fixed point; guard against float re-summation
    result_energy = evaluate(model, result)
    current_energy = evaluate(model, current)
    if result_energy > current_energy:
        return current
    if result_energy > evaluate(model, proposal):
        return proposal
    logger.debug(
        f"Graph-cut fusion: {current_energy:.6f} -> {result_energy:.6f} "
        f"({int(y.sum())} variables switched)"
    )
    return result
