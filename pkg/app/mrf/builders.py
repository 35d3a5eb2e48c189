"""
Desk-scale problem builders: synthetic stereo, synthetic optical flow and
random MRFs used as oracle fixtures.

All builders are deterministic for a fixed seed.
"""
import logging
from typing import Optional, Tuple

import numpy as np
from scipy import ndimage

from app.errors import ContractViolation

from .energy import truncated_abs_pairwise, truncated_distance_pairwise
from .models import (
    EdgeTablePairwise,
    EnergyModel,
    GridTopology,
    LabelTablePairwise,
    LabelUniverse,
    Labeling,
)

logger = logging.getLogger("mrf.builders")

# Stereo pairwise: truncated absolute label difference, scaled down against strong unaries
STEREO_SIGMA_S = 4.0
STEREO_PAIRWISE_WEIGHT = 0.005
STEREO_UNARY_TRUNCATION = 3.0

# Flow defaults (synthetic stand-in for the Middlebury flow pair)
FLOW_LABEL_COUNT = 60
FLOW_UNARY_TRUNCATION = 4.0
FLOW_PAIRWISE_TRUNCATION = 2.0
FLOW_PAIRWISE_WEIGHT = 0.5
FLOW_NOISE_LEVEL = 0.6

# Random fixtures keep costs on a 0.001 grid so fixed-point scaling is exact
RANDOM_COST_DECIMALS = 3


def _plane(rng: np.random.Generator, rows: np.ndarray, cols: np.ndarray,
           offset: float, slope: float) -> np.ndarray:
    gx, gy = rng.uniform(-slope, slope, size=2)
    return offset + gx * cols + gy * rows


def _random_box(rng: np.random.Generator, width: int, height: int) -> Tuple[int, int, int, int]:
    """Random rectangle covering at least a fifth of each dimension."""
    box_w = int(rng.integers(max(1, width // 5), max(2, width // 2) + 1))
    box_h = int(rng.integers(max(1, height // 5), max(2, height // 2) + 1))
    x0 = int(rng.integers(0, max(1, width - box_w + 1)))
    y0 = int(rng.integers(0, max(1, height - box_h + 1)))
    return x0, y0, min(width, x0 + box_w), min(height, y0 + box_h)


def synthetic_disparity(width: int, height: int, label_count: int,
                        rng: np.random.Generator, segments: int = 4) -> np.ndarray:
    """Piecewise-smooth integer disparity map: slanted background plus slanted boxes."""
    rows, cols = np.mgrid[0:height, 0:width].astype(np.float64)
    slope = 0.3 * label_count / max(width, height)
    disparity = _plane(rng, rows, cols, rng.uniform(0.2, 0.5) * (label_count - 1), slope)
    for _ in range(segments):
        x0, y0, x1, y1 = _random_box(rng, width, height)
        segment = _plane(rng, rows, cols, rng.uniform(0, label_count - 1), slope)
        disparity[y0:y1, x0:x1] = segment[y0:y1, x0:x1]
    return np.clip(np.rint(disparity), 0, label_count - 1).astype(np.int64)


def build_synthetic_stereo(
    width: int,
    height: int,
    label_count: int,
    noise_level: float,
    seed: int,
    sigma_s: float = STEREO_SIGMA_S,
    pairwise_weight: float = STEREO_PAIRWISE_WEIGHT,
    unary_truncation: float = STEREO_UNARY_TRUNCATION,
) -> Tuple[EnergyModel, Labeling]:
    """
    Synthetic stereo problem with strong unaries and submodular pairwise terms.

    unary(v, l) = min(|l - gt(v)|, unary_truncation) + N(0, noise_level), clamped at 0.
    pairwise = min(|a - b|, sigma_s), weighted by pairwise_weight.

    Returns:
        (model, ground_truth)
    """
    if label_count < 2:
        raise ContractViolation(f"Stereo needs at least 2 labels, got {label_count}")
    rng = np.random.default_rng(seed)
    topology = GridTopology(width, height)
    ground_truth = synthetic_disparity(width, height, label_count, rng).ravel()

    labels = np.arange(label_count)
    distance = np.abs(labels[None, :] - ground_truth[:, None]).astype(np.float64)
    unary = np.minimum(distance, unary_truncation)
    unary = unary + noise_level * rng.standard_normal(unary.shape)
    unary = np.maximum(unary, 0.0)

    table = truncated_abs_pairwise(labels[:, None], labels[None, :], sigma_s)
    model = EnergyModel(
        topology=topology,
        labels=LabelUniverse(label_count, payload=labels.astype(np.float64)),
        unary=unary,
        pairwise=LabelTablePairwise(table, kind="truncated_abs"),
        pairwise_weight=pairwise_weight,
        name="stereo-synth",
        metadata={
            "sigma_s": sigma_s,
            "unary_truncation": unary_truncation,
            "noise_level": noise_level,
            "seed": seed,
        },
    )
    logger.debug(f"Built synthetic stereo {width}x{height}x{label_count} (seed={seed})")
    return model, Labeling(ground_truth)


def default_flow_label_table(count: int = FLOW_LABEL_COUNT, spacing: float = 1.0) -> np.ndarray:
    """
    Deterministic (count, 2) table of flow vectors: the lattice points
    closest to the origin, ordered by length then angle.
    """
    if count < 2:
        raise ContractViolation(f"Flow label table needs at least 2 vectors, got {count}")
    radius = int(np.ceil(np.sqrt(count))) + 1
    axis = np.arange(-radius, radius + 1, dtype=np.float64)
    grid_x, grid_y = np.meshgrid(axis, axis)
    points = np.stack([grid_x.ravel(), grid_y.ravel()], axis=1)
    length = np.round(np.hypot(points[:, 0], points[:, 1]), 9)
    angle = np.round(np.arctan2(points[:, 1], points[:, 0]), 9)
    order = np.lexsort((angle, length))
    return points[order[:count]] * spacing


def synthetic_flow_field(width: int, height: int, flow_label_table: np.ndarray,
                         rng: np.random.Generator, objects: int = 2) -> np.ndarray:
    """(H, W, 2) smooth background motion plus independently moving boxes."""
    low = flow_label_table.min(axis=0)
    high = flow_label_table.max(axis=0)
    center = (low + high) / 2.0
    half = (high - low) / 2.0

    flow = np.empty((height, width, 2))
    for axis in range(2):
        smooth = ndimage.gaussian_filter(
            rng.standard_normal((height, width)), sigma=max(width, height) / 6.0
        )
        smooth = smooth / (np.abs(smooth).max() + 1e-12)
        flow[..., axis] = center[axis] + half[axis] * (
            rng.uniform(-0.5, 0.5) + 0.3 * smooth
        )
    for _ in range(objects):
        x0, y0, x1, y1 = _random_box(rng, width, height)
        flow[y0:y1, x0:x1] = center + half * rng.uniform(-0.8, 0.8, size=2)
    return np.clip(flow, low, high)


def build_synthetic_flow(
    width: int,
    height: int,
    flow_label_table: np.ndarray,
    seed: int,
    noise_level: float = FLOW_NOISE_LEVEL,
    unary_truncation: float = FLOW_UNARY_TRUNCATION,
    pairwise_truncation: float = FLOW_PAIRWISE_TRUNCATION,
    pairwise_weight: float = FLOW_PAIRWISE_WEIGHT,
) -> EnergyModel:
    """
    Synthetic optical flow problem over a discrete table of 2D flow labels.

    The unary is the truncated distance between a label's vector and a synthetic
    ground-truth flow, damped in low-texture areas and corrupted by noise; the
    pairwise term is the truncated Euclidean distance between label vectors.
    """
    table = np.asarray(flow_label_table, dtype=np.float64)
    if table.ndim != 2 or table.shape[0] == 0 or table.shape[1] != 2:
        raise ContractViolation("flow_label_table must be a non-empty (L, 2) array")
    rng = np.random.default_rng(seed)
    topology = GridTopology(width, height)
    flow = synthetic_flow_field(width, height, table, rng).reshape(-1, 2)

    # textureless regions carry little evidence
    texture = ndimage.gaussian_filter(rng.random((height, width)), sigma=3.0)
    texture = (texture - texture.min()) / (np.ptp(texture) + 1e-12)
    confidence = np.clip(1.5 * texture, 0.1, 1.0).ravel()

    distance = np.linalg.norm(table[None, :, :] - flow[:, None, :], axis=2)
    unary = confidence[:, None] * np.minimum(distance, unary_truncation)
    unary = np.maximum(unary + noise_level * rng.standard_normal(unary.shape), 0.0)

    pairwise_table = truncated_distance_pairwise(
        table[:, None, :], table[None, :, :], pairwise_truncation
    )
    model = EnergyModel(
        topology=topology,
        labels=LabelUniverse(table.shape[0], payload=table),
        unary=unary,
        pairwise=LabelTablePairwise(pairwise_table, kind="truncated_distance"),
        pairwise_weight=pairwise_weight,
        name="flow-synth",
        metadata={
            "pairwise_truncation": pairwise_truncation,
            "unary_truncation": unary_truncation,
            "noise_level": noise_level,
            "seed": seed,
        },
    )
    logger.debug(f"Built synthetic flow {width}x{height} with {table.shape[0]} labels (seed={seed})")
    return model


def build_random_mrf(
    width: int,
    height: int,
    label_count: int,
    submodular: bool,
    seed: int,
    pairwise_weight: float = 1.0,
) -> EnergyModel:
    """
    Random MRF fixture for oracle tests.

    Unaries are uniform in [0, 10]. With submodular set, pairwise costs are
    w_e * |a - b| (convex in the label difference), so every expansion move and
    every fusion whose candidates are ordered the same way at all variables is
    submodular. Otherwise each edge gets an arbitrary symmetric random table.
    """
    rng = np.random.default_rng(seed)
    topology = GridTopology(width, height)
    unary = np.round(rng.uniform(0.0, 10.0, size=(topology.variable_count, label_count)),
                     RANDOM_COST_DECIMALS)
    labels = np.arange(label_count)
    if submodular:
        weights = np.round(rng.uniform(0.5, 3.0, size=topology.edge_count), RANDOM_COST_DECIMALS)
        pairwise = LabelTablePairwise(
            np.abs(labels[:, None] - labels[None, :]).astype(np.float64),
            edge_weights=weights,
            kind="weighted_linear",
        )
    else:
        raw = np.round(
            rng.uniform(0.0, 10.0, size=(topology.edge_count, label_count, label_count)),
            RANDOM_COST_DECIMALS,
        )
        upper = np.triu(raw)
        tables = upper + np.transpose(np.triu(raw, k=1), (0, 2, 1))
        pairwise = EdgeTablePairwise(tables)
    return EnergyModel(
        topology=topology,
        labels=LabelUniverse(label_count),
        unary=unary,
        pairwise=pairwise,
        pairwise_weight=pairwise_weight,
        name="random",
        metadata={"submodular": submodular, "seed": seed},
    )


def random_labeling(model: EnergyModel, rng: np.random.Generator) -> Labeling:
    """Uniform random label per variable."""
    return Labeling(rng.integers(0, model.label_count, size=model.variable_count))


def constant_labeling(model: EnergyModel, label: int) -> Labeling:
    if not 0 <= label < model.label_count:
        raise ContractViolation(f"Label {label} outside 0..{model.label_count - 1}")
    return Labeling.constant(model.variable_count, label)


def build_stereo_from_images(
    left: np.ndarray,
    right: np.ndarray,
    label_count: int,
    window: int = 7,
    truncation: Optional[float] = None,
    sigma_s: float = STEREO_SIGMA_S,
    pairwise_weight: float = STEREO_PAIRWISE_WEIGHT,
) -> EnergyModel:
    """
    Stereo model from a rectified image pair.

    unary(v, d) is the window average of the truncated absolute intensity
    difference between left(x) and right(x - d), normalized to [0, 1].
    Columns without a match (x - d < 0) cost the truncation value.
    """
    left = np.asarray(left, dtype=np.float64)
    right = np.asarray(right, dtype=np.float64)
    if left.shape != right.shape or left.ndim != 2:
        raise ContractViolation("Stereo images must be 2D arrays of equal shape")
    if truncation is None:
        truncation = 0.1 * max(float(left.max()), 1.0)
    height, width = left.shape
    costs = np.empty((height, width, label_count))
    for d in range(label_count):
        diff = np.full((height, width), truncation)
        if d < width:
            diff[:, d:] = np.minimum(np.abs(left[:, d:] - right[:, : width - d]), truncation)
        costs[..., d] = ndimage.uniform_filter(diff, size=window, mode="nearest") / truncation
    labels = np.arange(label_count)
    return EnergyModel(
        topology=GridTopology(width, height),
        labels=LabelUniverse(label_count, payload=labels.astype(np.float64)),
        unary=costs.reshape(-1, label_count),
        pairwise=LabelTablePairwise(
            truncated_abs_pairwise(labels[:, None], labels[None, :], sigma_s),
            kind="truncated_abs",
        ),
        pairwise_weight=pairwise_weight,
        name="stereo-images",
        metadata={"sigma_s": sigma_s, "window": window, "truncation": truncation},
    )
