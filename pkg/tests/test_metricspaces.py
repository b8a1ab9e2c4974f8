import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sharpmin import (
    DistanceCombination,
    FiniteMetricSpace,
    MetricTree,
    edge_loc,
    node_loc,
    tree_distance,
    tree_geodesic,
    validate_metric,
)
from sharpmin.errors import InputError
from sharpmin.fixtures import random_tree


@pytest.fixture
def path_tree():
    # a - b - c with unit edges
    return MetricTree(("a", "b", "c"), [(0, 1, 1.0), (1, 2, 1.0)])


@pytest.fixture
def star_tree():
    return MetricTree(("hub", "l1", "l2", "l3"), [(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0)])


class TestValidateMetric:
    def test_line_metric_valid(self):
        m = [[0, 1, 2], [1, 0, 1], [2, 1, 0]]
        assert validate_metric(np.array(m, dtype=float)) == []

    def test_triangle_violation_witnessed(self):
        m = np.array([[0, 5, 1], [5, 0, 1], [1, 1, 0]], dtype=float)
        violations = validate_metric(m)
        triangles = [v for v in violations if v.axiom == "triangle"]
        assert triangles
        assert (0, 2, 1) in [v.witness for v in triangles]

    def test_asymmetry_witnessed(self):
        m = np.array([[0, 1], [2, 0]], dtype=float)
        assert any(v.axiom == "symmetry" for v in validate_metric(m))

    def test_space_constructor_rejects_invalid(self):
        with pytest.raises(InputError):
            FiniteMetricSpace(("a", "b"), np.array([[0, 1], [2, 0]], dtype=float))


class TestTreeDistance:
    def test_same_location(self, star_tree):
        assert tree_distance(star_tree, node_loc(1), node_loc(1)) == 0.0
        assert tree_distance(star_tree, edge_loc(0, 0.3), edge_loc(0, 0.3)) == 0.0

    def test_leaves_through_hub(self, star_tree):
        assert tree_distance(star_tree, node_loc(1), node_loc(2)) == 2.0

    def test_same_edge_offsets(self, star_tree):
        d = tree_distance(star_tree, edge_loc(0, 0.2), edge_loc(0, 0.7))
        assert d == pytest.approx(0.5, abs=1e-15)

    def test_offset_canonicalization(self, path_tree):
        # (edge, 0) and (edge, length) are the endpoint nodes.
        assert path_tree.canonicalize(edge_loc(0, 0.0)) == node_loc(0)
        assert path_tree.canonicalize(edge_loc(0, 1.0)) == node_loc(1)
        assert tree_distance(path_tree, edge_loc(0, 1.0), node_loc(1)) == 0.0

    def test_invalid_location_rejected(self, path_tree):
        with pytest.raises(InputError):
            tree_distance(path_tree, node_loc(7), node_loc(0))
        with pytest.raises(InputError):
            tree_distance(path_tree, edge_loc(0, 1.5), node_loc(0))


class TestTreeGeodesic:
    def test_endpoints(self, path_tree):
        u, v = node_loc(0), node_loc(2)
        assert tree_geodesic(path_tree, u, v, 0.0) == u
        assert tree_geodesic(path_tree, u, v, 1.0) == v

    def test_midpoint_is_middle_node(self, path_tree):
        assert tree_geodesic(path_tree, node_loc(0), node_loc(2), 0.5) == node_loc(1)

    def test_quarter_point(self, path_tree):
        # d(sigma, a) must equal 0.25 * 2 = 0.5, verified via tree_distance.
        g = tree_geodesic(path_tree, node_loc(0), node_loc(2), 0.25)
        assert g == edge_loc(0, 0.5)
        assert tree_distance(path_tree, g, node_loc(0)) == 0.5

    def test_parameter_out_of_range(self, path_tree):
        with pytest.raises(InputError):
            tree_geodesic(path_tree, node_loc(0), node_loc(2), 1.5)

    @given(st.integers(0, 10_000), st.floats(0, 1), st.floats(0, 1))
    @settings(max_examples=60, deadline=None)
    def test_constant_speed_identity(self, seed, s, sp):
        # d(sigma(s), sigma(s')) = |s - s'| * d(u, v) on random trees.
        rng = np.random.default_rng(seed)
        tree = random_tree(rng, int(rng.integers(3, 9)))
        u = _random_location(tree, rng)
        v = _random_location(tree, rng)
        total = tree_distance(tree, u, v)
        a = tree_geodesic(tree, u, v, s)
        b = tree_geodesic(tree, u, v, sp)
        assert abs(tree_distance(tree, a, b) - abs(s - sp) * total) <= 1e-12

    @given(st.integers(0, 10_000))
    @settings(max_examples=40, deadline=None)
    def test_sampled_locations_form_a_metric(self, seed):
        rng = np.random.default_rng(seed)
        tree = random_tree(rng, int(rng.integers(3, 8)))
        locs = [_random_location(tree, rng) for _ in range(5)]
        locs = [tree.canonicalize(l) for l in locs]
        # Dedup so strict positivity applies.
        uniq = []
        for l in locs:
            if l not in uniq:
                uniq.append(l)
        n = len(uniq)
        m = np.array(
            [[tree_distance(tree, a, b) for b in uniq] for a in uniq]
        )
        assert all(v.magnitude <= 1e-12 for v in validate_metric(m))


def _random_location(tree, rng):
    if rng.uniform() < 0.4:
        return node_loc(int(rng.integers(len(tree.nodes))))
    e = int(rng.integers(len(tree.edges)))
    return tree.canonicalize(edge_loc(e, float(rng.uniform(0, tree.edges[e][2]))))


class TestTreeConstruction:
    def test_cycle_rejected(self):
        with pytest.raises(InputError):
            MetricTree(("a", "b", "c"), [(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)])

    def test_disconnected_rejected(self):
        with pytest.raises(InputError):
            MetricTree(("a", "b", "c", "d"), [(0, 1, 1.0), (0, 1, 2.0), (2, 3, 1.0)])

    def test_nonpositive_length_rejected(self):
        with pytest.raises(InputError):
            MetricTree(("a", "b"), [(0, 1, 0.0)])


class TestDistanceCombination:
    def test_evaluates_weighted_sum(self, star_tree):
        comb = DistanceCombination(((1.0, node_loc(1)), (2.0, node_loc(2))))
        # at the hub: 1*1 + 2*1 = 3
        assert comb(star_tree, node_loc(0)) == 3.0

    def test_negative_coefficient_rejected(self):
        with pytest.raises(InputError):
            DistanceCombination(((-1.0, node_loc(0)),))

    def test_empty_rejected(self):
        with pytest.raises(InputError):
            DistanceCombination(())
