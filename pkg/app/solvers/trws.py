"""
Sequential tree-reweighted message passing (TRW-S) over per-variable
candidate lists, used for multi-way fusion.

The grid is decomposed into its row chains and column chains. Nodes are
visited in raster order; all nodes on one anti-diagonal are independent
given their left and upper neighbors, so each diagonal is updated as one
vectorized step.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from app.errors import ContractViolation
from app.mrf.energy import check_labeling, evaluate, evaluate_many
from app.mrf.models import EnergyModel, Labeling
from config.settings import settings

logger = logging.getLogger("solvers.trws")


# ============================================================================
# Fusion problem
# ============================================================================

@dataclass(frozen=True, eq=False)
class FusionProblem:
    """
    Per-variable candidate lists for a multi-way fusion.

    candidates[v, k] is the k-th candidate label of variable v (first-seen
    order, current label first); entries at k >= counts[v] are -1.
    """
    model: EnergyModel
    current: Labeling
    candidates: np.ndarray
    counts: np.ndarray

    @property
    def max_candidates(self) -> int:
        return int(self.candidates.shape[1])

    @property
    def candidate_lists(self) -> List[List[int]]:
        return [
            [int(label) for label in row[:count]]
            for row, count in zip(self.candidates, self.counts)
        ]

    @property
    def is_trivial(self) -> bool:
        """All candidate lists are singletons."""
        return bool(np.all(self.counts == 1))

    def product_size(self) -> int:
        size = 1
        for count in self.counts.tolist():
            size *= count
        return size

    def labeling(self, choice: np.ndarray) -> Labeling:
        """Labeling from one candidate index per variable."""
        choice = np.asarray(choice, dtype=np.int64)
        return Labeling(self.candidates[np.arange(choice.shape[0]), choice])


def build_fusion_problem(
    model: EnergyModel, current: Labeling, candidates: Sequence[Labeling]
) -> FusionProblem:
    """Deduplicated candidate list per variable: current label first, then first-seen order."""
    check_labeling(model, current)
    for candidate in candidates:
        check_labeling(model, candidate)
    stack = np.stack([current.assignment] + [c.assignment for c in candidates])

    fresh = np.ones(stack.shape, dtype=bool)
    for m in range(1, stack.shape[0]):
        for earlier in range(m):
            fresh[m] &= stack[m] != stack[earlier]
    slots = np.cumsum(fresh, axis=0) - 1
    counts = fresh.sum(axis=0).astype(np.int64)

    table = np.full((stack.shape[1], int(counts.max())), -1, dtype=np.int64)
    rows, variables = np.nonzero(fresh)
    table[variables, slots[rows, variables]] = stack[rows, variables]
    table.setflags(write=False)
    counts.setflags(write=False)
    return FusionProblem(model=model, current=current, candidates=table, counts=counts)


# ============================================================================
# TRW-S
# ============================================================================

@dataclass
class TrwsResult:
    labeling: Labeling
    energy: float
    lower_bound: float
    bounds: List[float] = field(default_factory=list)
    passes: int = 0


class TrwsState:
    """
    Messages and potentials of one TRW-S run; (H, W, K) grids padded to K
    candidates. Padded candidates have infinite unary cost and zero pairwise
    cost, so they never win a minimization.
    """

    def __init__(self, fp: FusionProblem):
        model = fp.model
        topo = model.topology
        self.fp = fp
        self.height, self.width = topo.height, topo.width
        H, W, K = self.height, self.width, fp.max_candidates
        self.K = K

        cand = fp.candidates
        valid = cand >= 0
        safe = np.where(valid, cand, 0)
        variables = np.arange(topo.variable_count)[:, None]
        unary = np.where(valid, model.unary[variables, safe], np.inf)
        self.unary = unary.reshape(H, W, K)

        grid_cand = safe.reshape(H, W, K)
        grid_valid = valid.reshape(H, W, K)
        self.horizontal = np.zeros((H, max(W - 1, 0), K, K))
        if W > 1:
            ids = np.arange(topo.horizontal_edge_count).reshape(H, W - 1)
            costs = model.edge_costs(
                ids[:, :, None, None],
                grid_cand[:, :-1, :, None],
                grid_cand[:, 1:, None, :],
            )
            mask = grid_valid[:, :-1, :, None] & grid_valid[:, 1:, None, :]
            self.horizontal = np.where(mask, costs, 0.0)
        self.vertical = np.zeros((max(H - 1, 0), W, K, K))
        if H > 1:
            ids = topo.horizontal_edge_count + np.arange(topo.vertical_edge_count).reshape(H - 1, W)
            costs = model.edge_costs(
                ids[:, :, None, None],
                grid_cand[:-1, :, :, None],
                grid_cand[1:, :, None, :],
            )
            mask = grid_valid[:-1, :, :, None] & grid_valid[1:, :, None, :]
            self.vertical = np.where(mask, costs, 0.0)

        # messages arriving at (r, c) from each neighbor
        self.from_left = np.zeros((H, W, K))
        self.from_right = np.zeros((H, W, K))
        self.from_up = np.zeros((H, W, K))
        self.from_down = np.zeros((H, W, K))

        self.chains = int(W > 1) + int(H > 1)
        self.gamma = 1.0 / self.chains if self.chains else 1.0
        self.diagonals = [self._diagonal(d) for d in range(H + W - 1)]

    def _diagonal(self, d: int) -> Tuple[np.ndarray, np.ndarray]:
        rows = np.arange(max(0, d - self.width + 1), min(self.height - 1, d) + 1)
        return rows, d - rows

    def belief(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        return (
            self.unary[rows, cols]
            + self.from_left[rows, cols]
            + self.from_right[rows, cols]
            + self.from_up[rows, cols]
            + self.from_down[rows, cols]
        )

    @staticmethod
    def _send(h: np.ndarray, pairwise: np.ndarray) -> np.ndarray:
        """min over sender label of h + pairwise, normalized to min 0."""
        message = (h[:, :, None] + pairwise).min(axis=1)
        return message - message.min(axis=1, keepdims=True)

    def forward_pass(self) -> None:
        for rows, cols in self.diagonals:
            h = self.gamma * self.belief(rows, cols)
            right = cols < self.width - 1
            if np.any(right):
                r, c = rows[right], cols[right]
                self.from_left[r, c + 1] = self._send(
                    h[right] - self.from_right[r, c], self.horizontal[r, c]
                )
            down = rows < self.height - 1
            if np.any(down):
                r, c = rows[down], cols[down]
                self.from_up[r + 1, c] = self._send(
                    h[down] - self.from_down[r, c], self.vertical[r, c]
                )

    def backward_pass(self) -> None:
        for rows, cols in reversed(self.diagonals):
            h = self.gamma * self.belief(rows, cols)
            left = cols > 0
            if np.any(left):
                r, c = rows[left], cols[left]
                self.from_right[r, c - 1] = self._send(
                    h[left] - self.from_left[r, c],
                    np.swapaxes(self.horizontal[r, c - 1], 1, 2),
                )
            up = rows > 0
            if np.any(up):
                r, c = rows[up], cols[up]
                self.from_down[r - 1, c] = self._send(
                    h[up] - self.from_up[r, c],
                    np.swapaxes(self.vertical[r - 1, c], 1, 2),
                )

    def lower_bound(self) -> float:
        """
        Sum over row and column chains of each chain's exact minimum, with
        reparameterized unaries split evenly between the chains of a node.
        """
        H, W = self.height, self.width
        theta = self.unary + self.from_left + self.from_right + self.from_up + self.from_down
        if not self.chains:
            return float(theta.min(axis=2).sum())
        theta = theta / self.chains
        bound = 0.0
        if W > 1:
            # reparameterized horizontal edges: theta_uv - m_uv(x_v) - m_vu(x_u)
            edges = (
                self.horizontal
                - self.from_left[:, 1:, None, :]
                - self.from_right[:, :-1, :, None]
            )
            cost = theta[:, 0]
            for c in range(1, W):
                cost = (cost[:, :, None] + edges[:, c - 1]).min(axis=1) + theta[:, c]
            bound += float(cost.min(axis=1).sum())
        if H > 1:
            edges = (
                self.vertical
                - self.from_up[1:, :, None, :]
                - self.from_down[:-1, :, :, None]
            )
            cost = theta[0]
            for r in range(1, H):
                cost = (cost[:, :, None] + edges[r - 1]).min(axis=1) + theta[r]
            bound += float(cost.min(axis=1).sum())
        return bound

    def extract(self) -> np.ndarray:
        """
        Greedy labeling in raster order: each node minimizes its unary plus the
        pairwise cost to already-fixed left/upper neighbors plus the messages
        from its right/lower neighbors. Ties go to the lowest candidate index.
        """
        H, W, K = self.height, self.width, self.K
        choice = np.zeros((H, W), dtype=np.int64)
        for rows, cols in self.diagonals:
            score = self.unary[rows, cols] + self.from_right[rows, cols] + self.from_down[rows, cols]
            left = cols > 0
            if np.any(left):
                r, c = rows[left], cols[left]
                score[left] += self.horizontal[r, c - 1, choice[r, c - 1], :]
            up = rows > 0
            if np.any(up):
                r, c = rows[up], cols[up]
                score[up] += self.vertical[r - 1, c, choice[r - 1, c], :]
            choice[rows, cols] = np.argmin(score, axis=1)
        return choice.ravel()


def trws_run(fp: FusionProblem, max_passes: Optional[int] = None,
             rel_tol: Optional[float] = None) -> TrwsResult:
    """TRW-S with the bound history; see trws_solve."""
    max_passes = settings.trws_max_passes if max_passes is None else max_passes
    rel_tol = settings.trws_rel_tol if rel_tol is None else rel_tol
    if max_passes < 1:
        raise ContractViolation(f"max_passes must be >= 1, got {max_passes}")
    model = fp.model

    if fp.is_trivial:
        energy = evaluate(model, fp.current)
        return TrwsResult(fp.current, energy, energy, [energy], 0)

    state = TrwsState(fp)
    bounds: List[float] = []
    best_choice = None
    best_energy = np.inf
    passes = 0
    for passes in range(1, max_passes + 1):
        state.forward_pass()
        state.backward_pass()
        bounds.append(state.lower_bound())

        choice = state.extract()
        labels = fp.candidates[np.arange(choice.shape[0]), choice]
        energy = float(evaluate_many(model, labels[None, :])[0])
        if energy < best_energy:
            best_energy, best_choice = energy, choice

        if len(bounds) >= 2:
            improvement = bounds[-1] - bounds[-2]
            if improvement < rel_tol * max(abs(bounds[-2]), 1.0):
                break

    labeling = fp.labeling(best_choice)
    logger.debug(
        f"TRW-S: {passes} passes, bound {bounds[-1]:.6f}, energy {best_energy:.6f}"
    )
    return TrwsResult(labeling, best_energy, max(bounds), bounds, passes)


def trws_solve(fp: FusionProblem, max_passes: Optional[int] = None,
               rel_tol: Optional[float] = None) -> Tuple[Labeling, float]:
    """
    Minimize over the candidate product space.

    Runs forward/backward passes until max_passes or until the lower bound
    improves by less than rel_tol (relative). Returns the best extracted
    labeling and the lower bound.
    """
    result = trws_run(fp, max_passes, rel_tol)
    return result.labeling, result.lower_bound


def multiway_fusion(model: EnergyModel, current: Labeling, candidates: Sequence[Labeling],
                    max_passes: Optional[int] = None, rel_tol: Optional[float] = None) -> Labeling:
    """
    Fuse current with any number of candidate labelings by TRW-S.

    Falls back to current when the extracted labeling is worse.
    """
    fp = build_fusion_problem(model, current, candidates)
    if fp.is_trivial:
        return current
    labeling, _ = trws_solve(fp, max_passes, rel_tol)
    current_energy = evaluate(model, current)
    energy = evaluate(model, labeling)
    if energy > current_energy:
        logger.warning(
            f"TRW-S fusion regressed ({current_energy:.6f} -> {energy:.6f}); keeping current"
        )
        return current
    return labeling
