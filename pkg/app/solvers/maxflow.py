"""
Max-flow / min-cut on integer-capacity networks.

Dinic's algorithm (BFS level graph plus blocking flow by current-arc DFS)
over Python ints, so capacities never overflow. Arcs are stored in parallel
lists; arc h and its reverse are the pair (h, h ^ 1).
"""
import logging
from collections import deque
from dataclasses import dataclass
from enum import Enum
from typing import List, Tuple

import numpy as np

from app.errors import ContractViolation

logger = logging.getLogger("solvers.maxflow")


class CutSide(str, Enum):
    """Side of the minimum cut a node falls on."""
    SOURCE = "source"
    SINK = "sink"


class FlowNetwork:
    """
    Directed network over node_count non-terminal nodes plus source and sink.

    Non-terminal nodes are 0..node_count-1; the terminals are the
    `source` and `sink` attributes.
    """

    def __init__(self, node_count: int):
        if node_count < 0:
            raise ContractViolation(f"node_count must be >= 0, got {node_count}")
        self.node_count = node_count
        self.source = node_count
        self.sink = node_count + 1
        self._to: List[int] = []
        self._cap: List[int] = []
        self._adjacency: List[List[int]] = [[] for _ in range(node_count + 2)]

    def add_arc(self, tail: int, head: int, capacity: int, reverse_capacity: int = 0) -> int:
        """
        Add an arc and its paired reverse arc.

        Returns:
            Handle of the forward arc (the reverse arc is handle ^ 1)
        """
        if capacity < 0 or reverse_capacity < 0:
            raise ContractViolation("Arc capacities must be non-negative")
        if tail == head:
            raise ContractViolation(f"Self-loop on node {tail}")
        handle = len(self._to)
        self._to.append(head)
        self._cap.append(int(capacity))
        self._adjacency[tail].append(handle)
        self._to.append(tail)
        self._cap.append(int(reverse_capacity))
        self._adjacency[head].append(handle + 1)
        return handle

    def add_terminal_arcs(self, node: int, source_capacity: int, sink_capacity: int) -> None:
        """Connect a node to the terminals, skipping zero capacities."""
        if source_capacity > 0:
            self.add_arc(self.source, node, source_capacity)
        if sink_capacity > 0:
            self.add_arc(node, self.sink, sink_capacity)

    @property
    def arc_count(self) -> int:
        """Number of forward arcs (each has a paired reverse arc)."""
        return len(self._to) // 2

    def arcs(self) -> List[Tuple[int, int, int, int]]:
        """All stored arcs as (tail, head, capacity, reverse handle)."""
        return [
            (self._to[h ^ 1], self._to[h], self._cap[h], h ^ 1)
            for h in range(len(self._to))
        ]


@dataclass(frozen=True, eq=False)
class CutAssignment:
    """Cut side of each non-terminal node; True means SOURCE."""
    source_side: np.ndarray

    def side(self, node: int) -> CutSide:
        return CutSide.SOURCE if self.source_side[node] else CutSide.SINK

    def __len__(self) -> int:
        return int(self.source_side.shape[0])


def cut_capacity(net: FlowNetwork, cut: CutAssignment) -> int:
    """Total capacity of arcs leaving the source side of a cut."""

    def on_source_side(node: int) -> bool:
        if node == net.source:
            return True
        if node == net.sink:
            return False
        return bool(cut.source_side[node])

    return sum(
        capacity
        for tail, head, capacity, _ in net.arcs()
        if on_source_side(tail) and not on_source_side(head)
    )


def _augment(source: int, sink: int, adjacency, to, cap, level, cursor) -> int:
    """Push flow along one shortest augmenting path; 0 when the level graph is blocked."""
    path: List[int] = []
    node = source
    while True:
        if node == sink:
            pushed = min(cap[a] for a in path)
            for a in path:
                cap[a] -= pushed
                cap[a ^ 1] += pushed
            return pushed
        arcs = adjacency[node]
        advanced = False
        while cursor[node] < len(arcs):
            a = arcs[cursor[node]]
            head = to[a]
            if cap[a] > 0 and level[head] == level[node] + 1:
                path.append(a)
                node = head
                advanced = True
                break
            cursor[node] += 1
        if not advanced:
            if node == source:
                return 0
            # dead end: prune from the level graph and retreat
            level[node] = -1
            a = path.pop()
            node = to[a ^ 1]
            cursor[node] += 1


def solve_maxflow(net: FlowNetwork) -> Tuple[int, CutAssignment]:
    """
    Maximum flow value and a minimum cut.

    The network itself is left untouched; residual capacities live in a copy.
    The cut's source side is the set reachable from the source in the final
    residual graph, which makes the assignment canonical.
    """
    total = net.node_count + 2
    source, sink = net.source, net.sink
    to = net._to
    cap = list(net._cap)
    adjacency = net._adjacency

    flow = 0
    phases = 0
    while True:
        level = [-1] * total
        level[source] = 0
        queue = deque([source])
        while queue:
            node = queue.popleft()
            for a in adjacency[node]:
                if cap[a] > 0 and level[to[a]] < 0:
                    level[to[a]] = level[node] + 1
                    queue.append(to[a])
        if level[sink] < 0:
            break
        phases += 1
        cursor = [0] * total
        while True:
            pushed = _augment(source, sink, adjacency, to, cap, level, cursor)
            if not pushed:
                break
            flow += pushed

    reachable = np.zeros(total, dtype=bool)
    reachable[source] = True
    queue = deque([source])
    while queue:
        node = queue.popleft()
        for a in adjacency[node]:
            head = to[a]
            if cap[a] > 0 and not reachable[head]:
                reachable[head] = True
                queue.append(head)

    logger.debug(
        f"Max-flow {flow} on {net.node_count} nodes / {net.arc_count} arcs in {phases} phases"
    )
    return flow, CutAssignment(reachable[: net.node_count].copy())
