"""
Proposal generators.

A generator turns (model, current labeling, rng) into a new candidate
labeling. Instances are owned by a single worker; only the constant-label
generator carries state (its cursor).
"""
import logging
from abc import ABC, abstractmethod
from collections import Counter
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import ndimage

from app.errors import ContractViolation
from app.mrf.builders import constant_labeling, random_labeling
from app.mrf.models import EnergyModel, Labeling
from config.settings import settings

logger = logging.getLogger("proposals.generators")


class ProposalGenerator(ABC):
    """Named proposal scheme."""

    name: str = "proposal"

    @abstractmethod
    def generate(self, model: EnergyModel, current: Labeling, rng: np.random.Generator) -> Labeling:
        """Return a valid labeling for model."""

    def __repr__(self) -> str:
        return f"{type(self).__name__}({self.name})"


def _require_vector_payload(model: EnergyModel, scheme: str) -> np.ndarray:
    if not model.labels.has_vector_payload:
        raise ContractViolation(f"{scheme} proposals need 2D flow-vector label payloads")
    return model.labels.payload


# ============================================================================
# Label-order schemes
# ============================================================================

class ConstantLabelGenerator(ProposalGenerator):
    """Constant labelings cycling through a fixed label order."""

    name = "constant"

    def __init__(self, order: Sequence[int]):
        order = [int(label) for label in order]
        if not order:
            raise ContractViolation("Constant-label order must not be empty")
        if len(set(order)) != len(order):
            raise ContractViolation("Constant-label order must not repeat labels")
        self.order: Tuple[int, ...] = tuple(order)
        self._cursor = 0

    def generate(self, model, current, rng):
        labeling = constant_labeling(model, self.order[self._cursor])
        self._cursor = (self._cursor + 1) % len(self.order)
        return labeling


class RandomLabelingGenerator(ProposalGenerator):
    """Uniform random label per variable."""

    name = "random"

    def generate(self, model, current, rng):
        return random_labeling(model, rng)


# ============================================================================
# Flow-field schemes
# ============================================================================

class ShiftGenerator(ProposalGenerator):
    """
    Current field translated by a random (axis, amount, sign); borders
    replicate the nearest in-range source (clamp to edge).
    """

    name = "shift"

    def __init__(self, amounts: Sequence[int] = (1, 2, 3), axes: Sequence[str] = ("x", "y")):
        if not amounts or any(a < 0 for a in amounts):
            raise ContractViolation("Shift amounts must be non-negative and non-empty")
        if not axes or any(axis not in ("x", "y") for axis in axes):
            raise ContractViolation("Shift axes must be drawn from {'x', 'y'}")
        self.amounts = tuple(int(a) for a in amounts)
        self.axes = tuple(axes)

    def generate(self, model, current, rng):
        _require_vector_payload(model, "Shift")
        axis = self.axes[int(rng.integers(len(self.axes)))]
        amount = self.amounts[int(rng.integers(len(self.amounts)))]
        sign = 1 if rng.random() < 0.5 else -1
        return shift_labeling(model, current, axis, sign * amount)


def shift_labeling(model: EnergyModel, current: Labeling, axis: str, offset: int) -> Labeling:
    """result(r, c) = current(r, c - offset) for axis x (r - offset for y), clamped."""
    topo = model.topology
    grid = current.as_grid(topo)
    rows = np.arange(topo.height)
    cols = np.arange(topo.width)
    if axis == "x":
        cols = np.clip(cols - offset, 0, topo.width - 1)
    else:
        rows = np.clip(rows - offset, 0, topo.height - 1)
    return Labeling(grid[np.ix_(rows, cols)])


class StaggerGenerator(ProposalGenerator):
    """Whole field moved by one Gaussian vector, snapped to the nearest label."""

    name = "stagger"

    def __init__(self, sigma: Optional[float] = None):
        self.sigma = settings.stagger_sigma if sigma is None else float(sigma)
        if self.sigma < 0:
            raise ContractViolation(f"sigma must be >= 0, got {self.sigma}")

    def generate(self, model, current, rng):
        payload = _require_vector_payload(model, "Stagger")
        offset = rng.normal(0.0, self.sigma, size=2) if self.sigma > 0 else np.zeros(2)
        return Labeling(model.labels.snap(payload[current.assignment] + offset))


class PerturbGenerator(ProposalGenerator):
    """Every flow vector moved by its own Gaussian vector, snapped to the nearest label."""

    name = "perturb"

    def __init__(self, sigma: Optional[float] = None):
        self.sigma = settings.perturb_sigma if sigma is None else float(sigma)
        if self.sigma < 0:
            raise ContractViolation(f"sigma must be >= 0, got {self.sigma}")

    def generate(self, model, current, rng):
        payload = _require_vector_payload(model, "Perturb")
        noise = (
            rng.normal(0.0, self.sigma, size=(model.variable_count, 2))
            if self.sigma > 0
            else np.zeros((model.variable_count, 2))
        )
        return Labeling(model.labels.snap(payload[current.assignment] + noise))


class WindowEstimateGenerator(ProposalGenerator):
    """
    Winner-take-all labels from box-filtered unary costs.

    Each call picks a window size and a random subset of labels, so repeated
    calls give diverse dense estimates.
    """

    name = "window"

    def __init__(self, windows: Sequence[int] = (3, 5, 7), keep_fraction: float = 0.5):
        if not windows or any(w < 1 for w in windows):
            raise ContractViolation("Window sizes must be positive")
        if not 0 < keep_fraction <= 1:
            raise ContractViolation(f"keep_fraction must be in (0, 1], got {keep_fraction}")
        self.windows = tuple(int(w) for w in windows)
        self.keep_fraction = keep_fraction

    def generate(self, model, current, rng):
        topo = model.topology
        window = self.windows[int(rng.integers(len(self.windows)))]
        keep = max(2, int(round(self.keep_fraction * model.label_count)))
        subset = np.sort(rng.choice(model.label_count, size=min(keep, model.label_count), replace=False))
        costs = model.unary[:, subset].reshape(topo.height, topo.width, subset.shape[0])
        smoothed = ndimage.uniform_filter(costs, size=(window, window, 1), mode="nearest")
        return Labeling(subset[np.argmin(smoothed, axis=2).ravel()])


# ============================================================================
# Composite
# ============================================================================

class MixedGenerator(ProposalGenerator):
    """Picks one child scheme uniformly at random per call."""

    name = "mixed"

    def __init__(self, children: Sequence[ProposalGenerator]):
        if not children:
            raise ContractViolation("Mixed generator needs at least one child")
        self.children = list(children)
        self.usage: Counter = Counter()

    def generate(self, model, current, rng):
        child = self.children[int(rng.integers(len(self.children)))]
        self.usage[child.name] += 1
        return child.generate(model, current, rng)


# ============================================================================
# Factories
# ============================================================================

def constant_label_generator(order: Sequence[int]) -> ConstantLabelGenerator:
    return ConstantLabelGenerator(order)


def shift_generator(amounts: Sequence[int] = (1, 2, 3), axes: Sequence[str] = ("x", "y")) -> ShiftGenerator:
    return ShiftGenerator(amounts, axes)


def stagger_generator(sigma: Optional[float] = None) -> StaggerGenerator:
    return StaggerGenerator(sigma)


def perturb_generator(sigma: Optional[float] = None) -> PerturbGenerator:
    return PerturbGenerator(sigma)


def random_labeling_generator() -> RandomLabelingGenerator:
    return RandomLabelingGenerator()


def window_estimate_generator(windows: Sequence[int] = (3, 5, 7),
                              keep_fraction: float = 0.5) -> WindowEstimateGenerator:
    return WindowEstimateGenerator(windows, keep_fraction)


def mixed_generator(children: Sequence[ProposalGenerator]) -> MixedGenerator:
    return MixedGenerator(children)
