"""
Tests for grid MRF models, energy evaluation and problem builders.
"""
import numpy as np
import pytest
from hypothesis import given, settings as hypothesis_settings, strategies as st

from app.errors import ContractViolation
from app.mrf import (
    GridTopology,
    LabelUniverse,
    Labeling,
    STEREO_PAIRWISE_WEIGHT,
    STEREO_SIGMA_S,
    build_random_mrf,
    build_stereo_from_images,
    build_synthetic_flow,
    build_synthetic_stereo,
    check_labeling,
    constant_labeling,
    default_flow_label_table,
    evaluate,
    load_pgm,
    random_labeling,
    to_fixed_point,
    truncated_abs_pairwise,
    truncated_distance_pairwise,
)
from app.solvers import brute_force_map, build_fusion_energy, is_submodular_fusion

from .conftest import abs_table, hand_energy, random_labeling_list, table_model


# =============================================================================
# Topology and labels
# =============================================================================

class TestGridTopology:
    """Tests for the 4-connected grid."""

    @pytest.mark.parametrize("width,height", [(1, 1), (1, 5), (4, 1), (3, 3), (7, 4)])
    def test_edge_count_formula(self, width, height):
        topo = GridTopology(width, height)
        assert topo.edge_count == width * (height - 1) + height * (width - 1)
        assert topo.edges.shape == (topo.edge_count, 2)

    def test_edges_are_unique_neighbor_pairs(self):
        topo = GridTopology(5, 4)
        pairs = {tuple(sorted(edge)) for edge in topo.edges.tolist()}
        assert len(pairs) == topo.edge_count
        for u, v in pairs:
            (ru, cu), (rv, cv) = topo.coords(u), topo.coords(v)
            assert abs(ru - rv) + abs(cu - cv) == 1

    def test_horizontal_edges_come_first(self):
        topo = GridTopology(3, 2)
        row, col = 1, 1
        assert topo.edges[row * (topo.width - 1) + col].tolist() == [
            topo.index(row, col), topo.index(row, col + 1)
        ]
        assert topo.edges[topo.horizontal_edge_count].tolist() == [0, 3]

    def test_single_pixel_has_no_edges(self):
        assert GridTopology(1, 1).edges.shape == (0, 2)

    def test_empty_grid_rejected(self):
        with pytest.raises(ContractViolation):
            GridTopology(0, 3)


class TestLabelUniverse:

    def test_single_label_rejected(self):
        with pytest.raises(ContractViolation):
            LabelUniverse(1)

    def test_payload_length_checked(self):
        with pytest.raises(ContractViolation):
            LabelUniverse(3, payload=np.zeros((2, 2)))

    def test_snap_picks_nearest_vector(self):
        labels = LabelUniverse(3, payload=[[0, 0], [1, 0], [0, 2]])
        assert labels.snap([[0.9, 0.1], [0.1, 1.6], [-3, 0]]).tolist() == [1, 2, 0]

    def test_snap_needs_vector_payload(self):
        with pytest.raises(ContractViolation):
            LabelUniverse(3, payload=[0.0, 1.0, 2.0]).snap([[0.0, 0.0]])


# =============================================================================
# Energy evaluation
# =============================================================================

class TestEvaluate:
    """Tests for evaluate and the pairwise families."""

    def test_two_pixel_example(self, two_pixel_model):
        assert evaluate(two_pixel_model, Labeling.from_list([0, 1])) == 2.0

    def test_zero_weight_zero_unary(self):
        unary = np.zeros((4, 3))
        unary[:, 1:] = 7.0
        model = table_model(unary, abs_table(3), width=2, height=2, weight=0.0)
        assert evaluate(model, Labeling.constant(4, 0)) == 0.0

    def test_matches_hand_sum_on_2x2(self):
        rng = np.random.default_rng(3)
        model = table_model(rng.integers(0, 10, size=(4, 3)), abs_table(3), 2, 2)
        labeling = Labeling(rng.integers(0, 3, size=4))
        assert evaluate(model, labeling) == hand_energy(model, labeling)

    def test_is_pure(self, submodular_3x3):
        labeling = random_labeling_list(submodular_3x3, 1, seed=4)[0]
        first = evaluate(submodular_3x3, labeling)
        second = evaluate(submodular_3x3, labeling)
        assert first == second
        assert np.array_equal(labeling.assignment, random_labeling_list(submodular_3x3, 1, seed=4)[0].assignment)

    def test_dimension_mismatch(self, two_pixel_model):
        with pytest.raises(ContractViolation):
            evaluate(two_pixel_model, Labeling.from_list([0, 1, 1]))

    def test_label_out_of_range(self, two_pixel_model):
        with pytest.raises(ContractViolation):
            evaluate(two_pixel_model, Labeling.from_list([0, 2]))
        with pytest.raises(ContractViolation):
            check_labeling(two_pixel_model, Labeling.from_list([-1, 0]))

    def test_single_pixel_energy_is_unary(self):
        model = table_model([[4.0, 2.5]], abs_table(2), 1, 1)
        assert evaluate(model, Labeling.from_list([1])) == 2.5

    @hypothesis_settings(max_examples=40, deadline=None)
    @given(
        width=st.integers(1, 3),
        height=st.integers(1, 3),
        labels=st.integers(2, 4),
        seed=st.integers(0, 10_000),
    )
    def test_matches_term_by_term_oracle(self, width, height, labels, seed):
        model = build_random_mrf(width, height, labels, submodular=False, seed=seed)
        labeling = random_labeling_list(model, 1, seed)[0]
        assert to_fixed_point(evaluate(model, labeling)) == to_fixed_point(hand_energy(model, labeling))


class TestPairwiseFamilies:

    def test_truncated_abs_examples(self):
        assert truncated_abs_pairwise(2, 9, 4) == 4
        assert truncated_abs_pairwise(5, 5, 4) == 0
        assert truncated_abs_pairwise(3, 5, 4) == 2
        assert truncated_abs_pairwise(2, 9, 4) * 0.005 == pytest.approx(0.02)

    def test_truncated_abs_rejects_non_positive_threshold(self):
        with pytest.raises(ContractViolation):
            truncated_abs_pairwise(1, 2, 0)

    @hypothesis_settings(max_examples=60, deadline=None)
    @given(a=st.integers(0, 255), b=st.integers(0, 255), sigma=st.floats(0.5, 300))
    def test_truncated_abs_symmetric_and_zero_on_diagonal(self, a, b, sigma):
        assert truncated_abs_pairwise(a, b, sigma) == truncated_abs_pairwise(b, a, sigma)
        assert truncated_abs_pairwise(a, a, sigma) == 0

    def test_truncated_distance(self):
        assert truncated_distance_pairwise(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 10.0) == 5.0
        assert truncated_distance_pairwise(np.array([0.0, 0.0]), np.array([3.0, 4.0]), 2.0) == 2.0


# =============================================================================
# Builders
# =============================================================================

class TestStereoBuilder:

    def test_defaults_expose_published_constants(self):
        model, _ = build_synthetic_stereo(8, 6, 16, 0.5, seed=1)
        assert STEREO_SIGMA_S == 4
        assert STEREO_PAIRWISE_WEIGHT == 0.005
        assert model.pairwise_weight == 0.005
        assert model.metadata["sigma_s"] == 4
        assert model.pairwise_cost(0, 2, 9) == 4.0

    def test_deterministic_for_seed(self):
        first, gt1 = build_synthetic_stereo(20, 10, 8, 0.7, seed=3)
        second, gt2 = build_synthetic_stereo(20, 10, 8, 0.7, seed=3)
        assert np.array_equal(first.unary, second.unary)
        assert gt1 == gt2

    def test_zero_noise_ground_truth_is_optimal_on_tiny_grid(self):
        model, ground_truth = build_synthetic_stereo(3, 3, 2, 0.0, seed=1)
        best, energy = brute_force_map(model)
        assert evaluate(model, ground_truth) == energy
        assert best == ground_truth

    def test_zero_noise_ground_truth_beats_single_pixel_changes(self):
        model, ground_truth = build_synthetic_stereo(80, 60, 16, 0.0, seed=1)
        base = evaluate(model, ground_truth)
        rng = np.random.default_rng(0)
        for _ in range(20):
            changed = ground_truth.assignment.copy()
            v = int(rng.integers(model.variable_count))
            changed[v] = (changed[v] + int(rng.integers(1, 16))) % 16
            assert evaluate(model, Labeling(changed)) > base

    def test_unary_non_negative(self):
        model, _ = build_synthetic_stereo(16, 12, 8, 2.0, seed=5)
        assert model.unary.min() >= 0.0

    def test_stereo_from_shifted_images(self):
        rng = np.random.default_rng(2)
        left = rng.integers(0, 256, size=(20, 30)).astype(float)
        right = np.zeros_like(left)
        right[:, :-2] = left[:, 2:]
        model = build_stereo_from_images(left, right, label_count=5, window=3)
        winners = np.argmin(model.unary, axis=1).reshape(20, 30)
        assert np.all(winners[3:-3, 6:-6] == 2)


class TestFlowBuilder:

    def test_default_label_table(self):
        table = default_flow_label_table(60)
        assert table.shape == (60, 2)
        assert table[0].tolist() == [0.0, 0.0]
        assert len({tuple(row) for row in table.tolist()}) == 60
        norms = np.hypot(table[:, 0], table[:, 1])
        assert np.all(np.diff(norms) >= -1e-12)

    def test_identical_payloads_cost_nothing(self):
        model = build_synthetic_flow(4, 3, default_flow_label_table(9), seed=0)
        for label in range(9):
            assert model.pairwise_cost(0, label, label) == 0.0

    def test_euclidean_pairwise(self):
        table = np.array([[0.0, 0.0], [3.0, 4.0]])
        model = build_synthetic_flow(2, 1, table, seed=0, pairwise_truncation=10.0)
        assert model.pairwise_cost(0, 0, 1) == 5.0
        assert model.pairwise_cost(0, 1, 0) == 5.0

    def test_desk_scale_problem_is_evaluable(self):
        model = build_synthetic_flow(64, 48, default_flow_label_table(60), seed=7)
        for labeling in random_labeling_list(model, 3, seed=1):
            assert np.isfinite(evaluate(model, labeling))

    def test_small_crop_matches_hand_sum(self):
        model = build_synthetic_flow(2, 2, default_flow_label_table(60), seed=7)
        labeling = random_labeling_list(model, 1, seed=2)[0]
        assert evaluate(model, labeling) == pytest.approx(hand_energy(model, labeling), abs=1e-12)

    def test_rejects_bad_label_table(self):
        with pytest.raises(ContractViolation):
            build_synthetic_flow(4, 4, np.zeros((0, 2)), seed=1)
        with pytest.raises(ContractViolation):
            build_synthetic_flow(4, 4, np.zeros((5, 3)), seed=1)

    def test_deterministic_for_seed(self):
        table = default_flow_label_table(20)
        first = build_synthetic_flow(10, 8, table, seed=4)
        second = build_synthetic_flow(10, 8, table, seed=4)
        assert np.array_equal(first.unary, second.unary)


class TestRandomBuilder:

    def test_unaries_in_range(self):
        model = build_random_mrf(4, 4, 3, submodular=False, seed=1)
        assert model.unary.min() >= 0.0 and model.unary.max() <= 10.0

    def test_submodular_expansions_and_ordered_fusions(self):
        model = build_random_mrf(3, 3, 2, submodular=True, seed=5)
        rng = np.random.default_rng(0)
        for current in random_labeling_list(model, 30, seed=8):
            for label in range(model.label_count):
                assert is_submodular_fusion(model, current, Labeling.constant(9, label))
            upper = Labeling(np.maximum(current.assignment, rng.integers(0, 2, size=9)))
            assert is_submodular_fusion(model, current, upper)

    def test_ordered_fusions_submodular_over_many_seeds(self):
        for seed in range(100):
            model = build_random_mrf(3, 3, 4, submodular=True, seed=seed)
            rng = np.random.default_rng(seed)
            low = rng.integers(0, 4, size=9)
            high = np.maximum(low, rng.integers(0, 4, size=9))
            assert is_submodular_fusion(model, Labeling(low), Labeling(high))

    def test_non_submodular_has_violating_edge(self):
        model = build_random_mrf(2, 2, 3, submodular=False, seed=9)
        tables = model.pairwise.tables
        violated = False
        for table in tables:
            for a, b, c, d in np.ndindex(3, 3, 3, 3):
                if table[a, b] + table[c, d] > table[a, d] + table[c, b] + 1e-9:
                    violated = True
        assert violated

    def test_deterministic_for_seed(self):
        first = build_random_mrf(3, 3, 3, submodular=False, seed=2)
        second = build_random_mrf(3, 3, 3, submodular=False, seed=2)
        assert np.array_equal(first.unary, second.unary)
        assert np.array_equal(first.pairwise.tables, second.pairwise.tables)

    def test_costs_on_fixed_point_grid(self):
        model = build_random_mrf(3, 3, 3, submodular=False, seed=6)
        energy = build_fusion_energy(model, Labeling.constant(9, 0), Labeling.constant(9, 1))
        scaled = energy.tables * 1000
        assert np.allclose(scaled, np.round(scaled))


class TestLabelingHelpers:

    def test_constant_labeling(self, submodular_3x3):
        assert constant_labeling(submodular_3x3, 2) == Labeling.constant(9, 2)

    def test_constant_labeling_rejects_foreign_label(self, submodular_3x3):
        with pytest.raises(ContractViolation):
            constant_labeling(submodular_3x3, 3)

    def test_random_labeling_in_range_and_seeded(self, submodular_3x3):
        first = random_labeling(submodular_3x3, np.random.default_rng(4))
        second = random_labeling(submodular_3x3, np.random.default_rng(4))
        assert first == second
        check_labeling(submodular_3x3, first)


# =============================================================================
# PGM loader
# =============================================================================

class TestPgmLoader:

    def test_loads_8bit_with_comment(self, tmp_path):
        pixels = bytes(range(6))
        path = tmp_path / "image.pgm"
        path.write_bytes(b"P5\n# made by hand\n3 2\n255\n" + pixels)
        image = load_pgm(path)
        assert image.shape == (2, 3)
        assert image.tolist() == [[0, 1, 2], [3, 4, 5]]

    def test_loads_16bit_big_endian(self, tmp_path):
        values = np.array([[1, 300], [65535, 7]], dtype=">u2")
        path = tmp_path / "deep.pgm"
        path.write_bytes(b"P5 2 2 65535\n" + values.tobytes())
        assert load_pgm(path).tolist() == [[1, 300], [65535, 7]]

    def test_rejects_ascii_pgm(self, tmp_path):
        path = tmp_path / "ascii.pgm"
        path.write_bytes(b"P2\n2 1\n255\n1 2\n")
        with pytest.raises(ContractViolation):
            load_pgm(path)

    def test_rejects_truncated_pixels(self, tmp_path):
        path = tmp_path / "short.pgm"
        path.write_bytes(b"P5\n4 4\n255\n" + bytes(5))
        with pytest.raises(ContractViolation):
            load_pgm(path)
