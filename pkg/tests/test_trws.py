"""
Tests for fusion problems, TRW-S and multi-way fusion.
"""
import logging

import numpy as np
import pytest

from app.errors import ContractViolation
from app.mrf import Labeling, build_random_mrf, evaluate, to_fixed_point
from app.solvers import (
    brute_force_fusion,
    build_fusion_problem,
    multiway_fusion,
    trws_run,
    trws_solve,
)
from app.solvers import trws as trws_module

from .conftest import abs_table, random_labeling_list, table_model


# =============================================================================
# Fusion problems
# =============================================================================

class TestBuildFusionProblem:
    """Tests for per-variable candidate lists."""

    def test_set_union_example(self):
        model = table_model(np.zeros((2, 3)), abs_table(3), 2, 1)
        fp = build_fusion_problem(
            model, Labeling.from_list([0, 0]),
            [Labeling.from_list([1, 1]), Labeling.from_list([0, 2])],
        )
        assert fp.candidate_lists == [[0, 1], [0, 1, 2]]
        assert fp.counts.tolist() == [2, 3]
        assert fp.product_size() == 6

    def test_no_candidates_gives_singletons(self, submodular_3x3):
        current = Labeling.constant(9, 1)
        fp = build_fusion_problem(submodular_3x3, current, [])
        assert fp.is_trivial
        assert fp.candidate_lists == [[1]] * 9

    def test_duplicates_ignored(self, submodular_3x3):
        current, a, b = random_labeling_list(submodular_3x3, 3, seed=5)
        once = build_fusion_problem(submodular_3x3, current, [a, b])
        twice = build_fusion_problem(submodular_3x3, current, [a, b, a, current, b])
        assert once.candidate_lists == twice.candidate_lists

    def test_current_label_listed_first(self, submodular_3x3):
        current, proposal = random_labeling_list(submodular_3x3, 2, seed=6)
        fp = build_fusion_problem(submodular_3x3, current, [proposal])
        assert [lst[0] for lst in fp.candidate_lists] == current.to_list()

    def test_labeling_from_choice(self, submodular_3x3):
        current, proposal = random_labeling_list(submodular_3x3, 2, seed=7)
        fp = build_fusion_problem(submodular_3x3, current, [proposal])
        assert fp.labeling(np.zeros(9, dtype=np.int64)) == current


# =============================================================================
# TRW-S
# =============================================================================

class TestTrws:

    def test_chain_is_solved_exactly(self):
        for seed in range(20):
            model = build_random_mrf(3, 1, 4, submodular=False, seed=seed)
            current, proposal = random_labeling_list(model, 2, seed=seed)
            fp = build_fusion_problem(model, current, [proposal])
            labeling, bound = trws_solve(fp)
            _, best = brute_force_fusion(model, fp)
            assert to_fixed_point(evaluate(model, labeling)) == to_fixed_point(best)
            assert bound <= best + 1e-9

    def test_eight_variable_chains_match_exhaustive_search(self):
        for seed in range(50):
            model = build_random_mrf(8, 1, 4, submodular=False, seed=1000 + seed)
            current, *candidates = random_labeling_list(model, 3, seed=seed)
            fp = build_fusion_problem(model, current, candidates)
            labeling, bound = trws_solve(fp)
            _, best = brute_force_fusion(model, fp)
            assert to_fixed_point(evaluate(model, labeling)) == to_fixed_point(best), seed
            assert bound <= best + 1e-9

    def test_lower_bound_never_decreases(self):
        for seed in range(50):
            model = build_random_mrf(4, 4, 4, submodular=False, seed=2000 + seed)
            current, *candidates = random_labeling_list(model, 3, seed=seed)
            result = trws_run(build_fusion_problem(model, current, candidates))
            for before, after in zip(result.bounds, result.bounds[1:]):
                assert after >= before - 1e-9 * max(abs(before), 1.0), seed

    def test_long_chain_with_many_candidates(self):
        model = build_random_mrf(6, 1, 5, submodular=False, seed=3)
        current, *candidates = random_labeling_list(model, 4, seed=3)
        fp = build_fusion_problem(model, current, candidates)
        labeling, _ = trws_solve(fp)
        _, best = brute_force_fusion(model, fp)
        assert to_fixed_point(evaluate(model, labeling)) == to_fixed_point(best)

    def test_trivial_problem_returns_current(self, submodular_3x3):
        current = Labeling.constant(9, 0)
        fp = build_fusion_problem(submodular_3x3, current, [current])
        labeling, bound = trws_solve(fp)
        assert labeling == current
        assert bound == evaluate(submodular_3x3, current)

    @pytest.mark.parametrize("width,height", [(3, 3), (4, 3), (2, 2), (1, 4)])
    def test_lower_bound_below_product_space_minimum(self, width, height):
        for seed in range(5):
            model = build_random_mrf(width, height, 4, submodular=False, seed=seed)
            current, a, b = random_labeling_list(model, 3, seed=100 + seed)
            fp = build_fusion_problem(model, current, [a, b])
            result = trws_run(fp)
            _, best = brute_force_fusion(model, fp)
            assert result.lower_bound <= best + 1e-9
            assert result.energy >= best - 1e-9
            assert result.energy == pytest.approx(evaluate(model, result.labeling))

    def test_bound_history(self, nonsubmodular_2x3):
        current, proposal = random_labeling_list(nonsubmodular_2x3, 2, seed=8)
        result = trws_run(build_fusion_problem(nonsubmodular_2x3, current, [proposal]), max_passes=5)
        assert 1 <= result.passes <= 5
        assert len(result.bounds) == result.passes
        assert result.lower_bound == max(result.bounds)

    def test_requires_a_pass(self, nonsubmodular_2x3):
        current, proposal = random_labeling_list(nonsubmodular_2x3, 2, seed=9)
        with pytest.raises(ContractViolation):
            trws_run(build_fusion_problem(nonsubmodular_2x3, current, [proposal]), max_passes=0)


# =============================================================================
# Multi-way fusion
# =============================================================================

class TestMultiwayFusion:

    def test_current_only(self, submodular_3x3):
        current = random_labeling_list(submodular_3x3, 1, seed=1)[0]
        assert multiway_fusion(submodular_3x3, current, [current]) is current

    def test_result_in_product_space_and_not_worse(self):
        for seed in range(10):
            model = build_random_mrf(3, 3, 3, submodular=True, seed=seed)
            current, a, b = random_labeling_list(model, 3, seed=seed)
            fp = build_fusion_problem(model, current, [a, b])
            result = multiway_fusion(model, current, [a, b])
            _, best = brute_force_fusion(model, fp)
            assert evaluate(model, result) <= evaluate(model, current) + 1e-9
            assert evaluate(model, result) >= best - 1e-9
            for v, label in enumerate(result.to_list()):
                assert label in fp.candidate_lists[v]

    def test_safeguard_keeps_current(self, monkeypatch, caplog):
        model = table_model(np.zeros((9, 3)), abs_table(3), 3, 3)
        current = Labeling.constant(9, 0)
        worse = Labeling.from_list([0, 2, 0, 2, 0, 2, 0, 2, 0])
        assert evaluate(model, worse) > evaluate(model, current)
        monkeypatch.setattr(trws_module, "trws_solve", lambda fp, *args: (worse, 0.0))
        with caplog.at_level(logging.WARNING, logger="solvers.trws"):
            result = multiway_fusion(model, current, [worse, Labeling.constant(9, 1)])
        assert result is current
        assert "keeping current" in caplog.text
