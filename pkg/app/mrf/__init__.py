"""
Grid MRF problems - topology, labels, energies and problem builders.
"""

from .models import (
    GridTopology,
    LabelUniverse,
    PairwiseTerm,
    LabelTablePairwise,
    EdgeTablePairwise,
    EnergyModel,
    Labeling,
)
from .energy import (
    evaluate,
    evaluate_many,
    check_labeling,
    to_fixed_point,
    truncated_abs_pairwise,
    truncated_distance_pairwise,
)
from .builders import (
    build_synthetic_stereo,
    build_synthetic_flow,
    build_random_mrf,
    build_stereo_from_images,
    default_flow_label_table,
    random_labeling,
    constant_labeling,
    STEREO_SIGMA_S,
    STEREO_PAIRWISE_WEIGHT,
)
from .pgm import load_pgm

__all__ = [
    # Models
    "GridTopology",
    "LabelUniverse",
    "PairwiseTerm",
    "LabelTablePairwise",
    "EdgeTablePairwise",
    "EnergyModel",
    "Labeling",
    # Energy
    "evaluate",
    "evaluate_many",
    "check_labeling",
    "to_fixed_point",
    "truncated_abs_pairwise",
    "truncated_distance_pairwise",
    # Builders
    "build_synthetic_stereo",
    "build_synthetic_flow",
    "build_random_mrf",
    "build_stereo_from_images",
    "default_flow_label_table",
    "random_labeling",
    "constant_labeling",
    "STEREO_SIGMA_S",
    "STEREO_PAIRWISE_WEIGHT",
    "load_pgm",
]
