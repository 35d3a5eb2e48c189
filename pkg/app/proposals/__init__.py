"""
Proposals - pluggable sources of candidate labelings.
"""

from .generators import (
    ProposalGenerator,
    ConstantLabelGenerator,
    RandomLabelingGenerator,
    ShiftGenerator,
    StaggerGenerator,
    PerturbGenerator,
    WindowEstimateGenerator,
    MixedGenerator,
    shift_labeling,
    constant_label_generator,
    shift_generator,
    stagger_generator,
    perturb_generator,
    random_labeling_generator,
    window_estimate_generator,
    mixed_generator,
)

__all__ = [
    "ProposalGenerator",
    "ConstantLabelGenerator",
    "RandomLabelingGenerator",
    "ShiftGenerator",
    "StaggerGenerator",
    "PerturbGenerator",
    "WindowEstimateGenerator",
    "MixedGenerator",
    "shift_labeling",
    "constant_label_generator",
    "shift_generator",
    "stagger_generator",
    "perturb_generator",
    "random_labeling_generator",
    "window_estimate_generator",
    "mixed_generator",
]
