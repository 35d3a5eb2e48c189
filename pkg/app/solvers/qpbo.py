"""
QPBO (roof duality) for non-submodular binary fusion.

Every variable p gets two nodes in the network, p and its negation p_bar.
Label 0 means p on the source side and p_bar on the sink side; label 1 is
the mirror; anything else is UNLABELED.
"""
import logging
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

import numpy as np

from app.mrf.energy import check_labeling, evaluate
from app.mrf.models import EnergyModel, Labeling
from config.settings import settings

from .binary import BinaryEnergy, build_fusion_energy, differing_variables, restrict_energy, scale_costs
from .maxflow import FlowNetwork, solve_maxflow

logger = logging.getLogger("solvers.qpbo")


class QpboLabel(IntEnum):
    UNLABELED = -1
    ZERO = 0
    ONE = 1


@dataclass(frozen=True, eq=False)
class QpboResult:
    """Tri-state labels (QpboLabel values) and the roof-dual lower bound."""
    labels: np.ndarray
    lower_bound: float

    @property
    def unlabeled_count(self) -> int:
        return int(np.count_nonzero(self.labels == QpboLabel.UNLABELED))

    def label(self, variable: int) -> QpboLabel:
        return QpboLabel(int(self.labels[variable]))


def _normal_form(unary: np.ndarray, edges: np.ndarray, tables: np.ndarray):
    """
    Reparameterize integer costs so that every table row and column and every
    unary pair has a zero entry; the removed minima accumulate in a constant.
    """
    unary = unary.copy()
    tables = tables.copy()
    u, v = edges[:, 0], edges[:, 1]
    for i in (0, 1):
        row_min = np.minimum(tables[:, i, 0], tables[:, i, 1])
        tables[:, i, :] -= row_min[:, None]
        np.add.at(unary[:, i], u, row_min)
    for j in (0, 1):
        col_min = np.minimum(tables[:, 0, j], tables[:, 1, j])
        tables[:, :, j] -= col_min[:, None]
        np.add.at(unary[:, j], v, col_min)
    unary_min = unary.min(axis=1)
    unary -= unary_min[:, None]
    return unary, tables, int(unary_min.sum())


def qpbo_solve(energy: BinaryEnergy, scale: Optional[int] = None) -> QpboResult:
    """
    Run QPBO once on a binary energy.

    lower_bound = constant + flow / 2, since every term is represented twice
    in the doubled network.
    """
    scale = settings.fixed_point_scale if scale is None else scale
    n = energy.variable_count
    unary, tables, constant = _normal_form(
        scale_costs(energy.unary, scale), energy.edges, scale_costs(energy.tables, scale)
    )
    constant += int(round(energy.constant * scale))

    net = FlowNetwork(2 * n)

    def bar(node: int) -> int:
        return node + n

    for p, (cost0, cost1) in enumerate(unary.tolist()):
        if cost0 > 0:
            net.add_arc(p, net.sink, cost0)
            net.add_arc(net.source, bar(p), cost0)
        if cost1 > 0:
            net.add_arc(net.source, p, cost1)
            net.add_arc(bar(p), net.sink, cost1)
    for (p, q), table in zip(energy.edges.tolist(), tables.tolist()):
        (t00, t01), (t10, t11) = table
        if t01 > 0:
            net.add_arc(p, q, t01)
            net.add_arc(bar(q), bar(p), t01)
        if t10 > 0:
            net.add_arc(q, p, t10)
            net.add_arc(bar(p), bar(q), t10)
        if t00 > 0:
            net.add_arc(p, bar(q), t00)
            net.add_arc(q, bar(p), t00)
        if t11 > 0:
            net.add_arc(bar(p), q, t11)
            net.add_arc(bar(q), p, t11)

    flow, cut = solve_maxflow(net)
    primal = cut.source_side[:n]
    negated = cut.source_side[n:]
    labels = np.full(n, int(QpboLabel.UNLABELED), dtype=np.int64)
    if energy.is_submodular(scale):
        # no cross terms: the two halves are disconnected mirror images and
        # the primal half alone is an exact min cut
        labels[:] = np.where(primal, int(QpboLabel.ZERO), int(QpboLabel.ONE))
    else:
        labels[primal & ~negated] = int(QpboLabel.ZERO)
        labels[~primal & negated] = int(QpboLabel.ONE)

    lower_bound = (constant + flow / 2) / scale
    result = QpboResult(labels=labels, lower_bound=lower_bound)
    logger.debug(f"QPBO on {n} variables: {result.unlabeled_count} unlabeled, bound {lower_bound:.6f}")
    return result


def binary_fusion_qpbo(model: EnergyModel, current: Labeling, proposal: Labeling) -> Labeling:
    """
    Binary fusion by QPBO; UNLABELED variables keep their current label.

    Never returns a labeling worse than current.
    """
    check_labeling(model, current)
    check_labeling(model, proposal)
    if current == proposal:
        return current
    free = differing_variables(current, proposal)
    result = qpbo_solve(restrict_energy(build_fusion_energy(model, current, proposal), free))
    take = np.zeros(model.variable_count, dtype=bool)
    take[free] = result.labels == QpboLabel.ONE
    fused = Labeling(np.where(take, proposal.assignment, current.assignment))
    if evaluate(model, fused) > evaluate(model, current):
        return current
    return fused
