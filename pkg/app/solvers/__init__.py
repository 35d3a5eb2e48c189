"""
Solvers - max-flow, graph-cut and QPBO binary fusion, TRW-S multi-way
fusion, and exhaustive-search oracles.
"""

from .maxflow import (
    FlowNetwork,
    CutAssignment,
    CutSide,
    solve_maxflow,
    cut_capacity,
)
from .binary import (
    BinaryEnergy,
    build_fusion_energy,
    is_submodular_fusion,
    minimize_submodular,
    restrict_energy,
    binary_fusion_graphcut,
)
from .qpbo import (
    QpboLabel,
    QpboResult,
    qpbo_solve,
    binary_fusion_qpbo,
)
from .trws import (
    FusionProblem,
    TrwsResult,
    TrwsState,
    build_fusion_problem,
    trws_run,
    trws_solve,
    multiway_fusion,
)
from .oracle import (
    brute_force_map,
    brute_force_fusion,
)

__all__ = [
    # Max-flow
    "FlowNetwork",
    "CutAssignment",
    "CutSide",
    "solve_maxflow",
    "cut_capacity",
    # Binary fusion
    "BinaryEnergy",
    "build_fusion_energy",
    "is_submodular_fusion",
    "minimize_submodular",
    "restrict_energy",
    "binary_fusion_graphcut",
    # QPBO
    "QpboLabel",
    "QpboResult",
    "qpbo_solve",
    "binary_fusion_qpbo",
    # TRW-S
    "FusionProblem",
    "TrwsResult",
    "TrwsState",
    "build_fusion_problem",
    "trws_run",
    "trws_solve",
    "multiway_fusion",
    # Oracle
    "brute_force_map",
    "brute_force_fusion",
]
