"""
Benchmark problem registry.

Each problem bundles a model, a constant-label order shared by every
architecture, and a per-worker proposal generator factory.
"""
import logging
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional

import numpy as np

from app.errors import UsageError
from app.mrf.builders import (
    build_random_mrf,
    build_synthetic_flow,
    build_synthetic_stereo,
    default_flow_label_table,
)
from app.mrf.models import EnergyModel
from app.proposals.generators import (
    ConstantLabelGenerator,
    ProposalGenerator,
    mixed_generator,
    perturb_generator,
    random_labeling_generator,
    shift_generator,
    stagger_generator,
    window_estimate_generator,
)

logger = logging.getLogger("bench.problems")

GeneratorFactory = Callable[[int], ProposalGenerator]


@dataclass(frozen=True)
class ProblemSpec:
    """Default size and swarm parameters for one problem."""
    name: str
    width: int
    height: int
    labels: int
    sf_alpha: int
    sf_beta: int
    sf_share_every: int
    sf_ss_alpha: int


PROBLEM_SPECS: Dict[str, ProblemSpec] = {
    # stereo: SF fuses (alpha=4, beta=1) every iteration
    "stereo-synth": ProblemSpec("stereo-synth", 80, 60, 16, sf_alpha=4, sf_beta=1, sf_share_every=0, sf_ss_alpha=4),
    # flow: four (3,0) iterations, then one (0,3); SF-SS fuses three proposals
    "flow-synth": ProblemSpec("flow-synth", 64, 48, 60, sf_alpha=3, sf_beta=3, sf_share_every=4, sf_ss_alpha=3),
    "random": ProblemSpec("random", 12, 12, 4, sf_alpha=2, sf_beta=1, sf_share_every=4, sf_ss_alpha=2),
}


@dataclass
class BenchProblem:
    name: str
    model: EnergyModel
    label_order: List[int]
    spec: ProblemSpec
    make_generators: Callable[[int], GeneratorFactory]

    def generators(self, thread_count: int) -> GeneratorFactory:
        return self.make_generators(thread_count)


def _rotated(order: List[int], worker: int, thread_count: int) -> List[int]:
    """Same order, each worker starting at a different offset."""
    start = (worker * len(order)) // max(thread_count, 1)
    return order[start:] + order[:start]


def build_problem(
    name: str,
    seed: int = 1,
    width: Optional[int] = None,
    height: Optional[int] = None,
    labels: Optional[int] = None,
) -> BenchProblem:
    """
    Build a named benchmark problem.

    Raises:
        UsageError: for unknown problem names
    """
    if name not in PROBLEM_SPECS:
        raise UsageError(f"Unknown problem '{name}'; valid problems: {', '.join(PROBLEM_SPECS)}")
    spec = PROBLEM_SPECS[name]
    width = width or spec.width
    height = height or spec.height
    labels = labels or spec.labels
    order = [int(label) for label in np.random.default_rng(seed).permutation(labels)]

    if name == "stereo-synth":
        model, _ = build_synthetic_stereo(width, height, labels, noise_level=0.5, seed=seed)

        def make_generators(thread_count: int) -> GeneratorFactory:
            return lambda worker: ConstantLabelGenerator(_rotated(order, worker, thread_count))

    elif name == "flow-synth":
        model = build_synthetic_flow(width, height, default_flow_label_table(labels), seed=seed)

        def make_generators(thread_count: int) -> GeneratorFactory:
            return lambda worker: mixed_generator([
                window_estimate_generator(),
                shift_generator(),
                stagger_generator(),
                perturb_generator(),
            ])

    else:
        model = build_random_mrf(width, height, labels, submodular=False, seed=seed)

        def make_generators(thread_count: int) -> GeneratorFactory:
            return lambda worker: mixed_generator([
                ConstantLabelGenerator(_rotated(order, worker, thread_count)),
                random_labeling_generator(),
            ])

    logger.info(f"Built problem {name}: {model.to_dict()}")
    return BenchProblem(name=name, model=model, label_order=order, spec=spec,
                        make_generators=make_generators)
