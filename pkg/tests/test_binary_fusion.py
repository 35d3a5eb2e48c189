"""
Tests for binary fusion energies and exact graph-cut fusion.
"""
import numpy as np
import pytest

from app.errors import ContractViolation, NonSubmodularFusionError
from app.mrf import Labeling, build_random_mrf, evaluate, to_fixed_point
from app.solvers import (
    BinaryEnergy,
    binary_fusion_graphcut,
    brute_force_fusion,
    build_fusion_energy,
    build_fusion_problem,
    is_submodular_fusion,
    minimize_submodular,
    restrict_energy,
)

from .conftest import abs_table, table_model


def ordered_pair(model, rng):
    """(low, high) labelings with low <= high at every variable."""
    low = rng.integers(0, model.label_count, size=model.variable_count)
    high = np.maximum(low, rng.integers(0, model.label_count, size=model.variable_count))
    return Labeling(low), Labeling(high)


# =============================================================================
# Fusion energy and submodularity
# =============================================================================

class TestFusionEnergy:
    """Tests for build_fusion_energy and is_submodular_fusion."""

    def test_binary_energy_matches_model_energy(self, nonsubmodular_2x3):
        rng = np.random.default_rng(1)
        current = Labeling(rng.integers(0, 3, size=6))
        proposal = Labeling(rng.integers(0, 3, size=6))
        energy = build_fusion_energy(nonsubmodular_2x3, current, proposal)
        for _ in range(10):
            y = rng.integers(0, 2, size=6)
            fused = Labeling(np.where(y == 1, proposal.assignment, current.assignment))
            assert energy.energy(y) == pytest.approx(evaluate(nonsubmodular_2x3, fused))

    def test_frustrated_pair_is_not_submodular(self, frustrated_pair_model):
        assert not is_submodular_fusion(
            frustrated_pair_model, Labeling.from_list([0, 0]), Labeling.from_list([1, 1])
        )

    def test_untruncated_abs_on_ordered_labels(self):
        rng = np.random.default_rng(3)
        model = table_model(rng.integers(0, 9, size=(9, 5)), abs_table(5), 3, 3)
        for _ in range(20):
            low, high = ordered_pair(model, rng)
            assert is_submodular_fusion(model, low, high)
            assert is_submodular_fusion(model, high, low)

    def test_random_submodular_models_over_seeds(self):
        for seed in range(100):
            model = build_random_mrf(3, 3, 3, submodular=True, seed=seed)
            low, high = ordered_pair(model, np.random.default_rng(seed))
            assert is_submodular_fusion(model, low, high)

    def test_restricted_energy_matches_full_energy(self, nonsubmodular_2x3):
        rng = np.random.default_rng(8)
        current = Labeling(rng.integers(0, 3, size=6))
        proposal = Labeling(np.where(rng.random(6) < 0.5, current.assignment, (current.assignment + 1) % 3))
        full = build_fusion_energy(nonsubmodular_2x3, current, proposal)
        free = current.assignment != proposal.assignment
        restricted = restrict_energy(full, free)
        assert restricted.variable_count == int(free.sum())
        for _ in range(10):
            y = rng.integers(0, 2, size=6)
            assert restricted.energy(y[free]) == pytest.approx(full.energy(y))

    def test_restriction_without_free_variables_is_constant(self, nonsubmodular_2x3):
        current = Labeling(np.arange(6) % 3)
        full = build_fusion_energy(nonsubmodular_2x3, current, current)
        restricted = restrict_energy(full, np.zeros(6, dtype=bool))
        assert restricted.variable_count == 0
        assert restricted.edges.shape == (0, 2)
        assert restricted.energy([]) == pytest.approx(evaluate(nonsubmodular_2x3, current))

    def test_mixed_sizes_rejected(self, two_pixel_model):
        with pytest.raises(ContractViolation):
            is_submodular_fusion(two_pixel_model, Labeling.from_list([0, 1]), Labeling.from_list([0]))


# =============================================================================
# Graph-cut fusion
# =============================================================================

class TestGraphCutFusion:
    """Tests for binary_fusion_graphcut and minimize_submodular."""

    def test_two_pixel_example(self):
        model = table_model([[5, 0], [0, 5]], abs_table(2), 2, 1)
        current = Labeling.from_list([0, 0])
        proposal = Labeling.from_list([1, 1])
        assert evaluate(model, current) == 5
        assert evaluate(model, proposal) == 5
        result = binary_fusion_graphcut(model, current, proposal)
        assert result == Labeling.from_list([1, 0])
        assert evaluate(model, result) == 1

    def test_identical_inputs_returned_unchanged(self, submodular_3x3):
        current = Labeling.constant(9, 2)
        assert binary_fusion_graphcut(submodular_3x3, current, current) is current

    def test_non_submodular_input_rejected(self, frustrated_pair_model):
        with pytest.raises(NonSubmodularFusionError):
            binary_fusion_graphcut(
                frustrated_pair_model, Labeling.from_list([0, 0]), Labeling.from_list([1, 1])
            )

    def test_result_in_product_space(self, submodular_3x3):
        low, high = ordered_pair(submodular_3x3, np.random.default_rng(4))
        result = binary_fusion_graphcut(submodular_3x3, low, high)
        picked = (result.assignment == low.assignment) | (result.assignment == high.assignment)
        assert picked.all()

    def test_matches_product_space_oracle(self):
        for seed in range(100):
            model = build_random_mrf(3, 3, 3, submodular=True, seed=seed)
            current, proposal = ordered_pair(model, np.random.default_rng(1000 + seed))
            if seed % 2:
                current, proposal = proposal, current
            result = binary_fusion_graphcut(model, current, proposal)
            _, best = brute_force_fusion(model, build_fusion_problem(model, current, [proposal]))
            assert to_fixed_point(evaluate(model, result)) == to_fixed_point(best)
            assert evaluate(model, result) <= evaluate(model, current) + 1e-9

    def test_expansion_moves_match_oracle(self):
        for seed in range(30):
            model = build_random_mrf(3, 3, 4, submodular=True, seed=seed)
            rng = np.random.default_rng(seed)
            current = Labeling(rng.integers(0, 4, size=9))
            proposal = Labeling.constant(9, int(rng.integers(0, 4)))
            result = binary_fusion_graphcut(model, current, proposal)
            _, best = brute_force_fusion(model, build_fusion_problem(model, current, [proposal]))
            assert to_fixed_point(evaluate(model, result)) == to_fixed_point(best)

    def test_minimize_submodular_on_raw_energy(self):
        energy = BinaryEnergy(
            unary=np.array([[0.0, 2.0], [3.0, 0.0], [1.0, 1.5]]),
            edges=np.array([[0, 1], [1, 2]]),
            tables=np.array([[[0.0, 1.0], [1.0, 0.0]], [[0.0, 4.0], [4.0, 0.0]]]),
        )
        y = minimize_submodular(energy)
        best = min(
            energy.energy([a, b, c]) for a in (0, 1) for b in (0, 1) for c in (0, 1)
        )
        assert energy.energy(y) == best
        assert y.tolist() == [0, 1, 1]
