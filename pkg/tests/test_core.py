import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from rangereal.core import (
    DissimilarityVector,
    IntervalFamily,
    PreconditionError,
    StructureError,
    Variant,
    VariantError,
    WeightedGraph,
    WeightedTree,
    all_pairs,
    as_rational,
    check_distances,
    fmt,
    graph_two_weights,
    pair,
    tree_two_weights,
)

from helpers import general_trees, positive_graphs, positive_trees, simple_path_distances, small_fractions, tree_path_distances


def quartet_tree(internal=1):
    edges = [("a", 1, 1), ("a", 2, 1), ("b", 3, 1), ("b", 4, 1), ("a", "b", internal)]
    return WeightedTree.from_edges(edges, {k: k for k in range(1, 5)})


def test_as_rational_accepts_exact_forms():
    assert as_rational(3) == 3
    assert as_rational("-7/2") == Fraction(-7, 2)
    assert as_rational(Fraction(1, 3)) == Fraction(1, 3)
    assert as_rational(" 4/6 ") == Fraction(2, 3)


@pytest.mark.parametrize("bad", [0.5, "0.5", "1e3", True, None, "", "1_000"])
def test_as_rational_refuses_inexact_or_junk(bad):
    with pytest.raises((TypeError, ValueError)):
        as_rational(bad)


def test_fmt_canonical():
    assert fmt(Fraction(4, 2)) == "2"
    assert fmt(Fraction(-6, 4)) == "-3/2"
    assert fmt(0) == "0"


@given(small_fractions, small_fractions)
def test_rational_arithmetic_exact(a, b):
    assert (a + b) - b == a
    c = a * b
    assert c.denominator > 0
    assert Fraction(fmt(c)) == c
    if b:
        assert (a / b) * b == a


def test_pair_is_unordered():
    assert pair(3, 1) == (1, 3)
    with pytest.raises(ValueError):
        pair(2, 2)
    assert all_pairs(4) == [(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)]


def test_dissimilarity_must_be_total():
    with pytest.raises(StructureError, match="missing"):
        DissimilarityVector(3, {(1, 2): Fraction(1), (1, 3): Fraction(1)})
    d = DissimilarityVector.from_mapping(3, {(2, 1): 1, (1, 3): "1/2", (3, 2): 2})
    assert d[1, 2] == d[2, 1] == 1 and d[3, 1] == Fraction(1, 2)


class TestIntervalFamily:
    def test_lo_above_hi_rejected(self):
        with pytest.raises(PreconditionError, match="exceeds"):
            IntervalFamily.build(2, {(1, 2): (3, 2)}, "tree-general-closed")

    def test_open_variant_needs_nonempty_interval(self):
        with pytest.raises(PreconditionError, match="empty"):
            IntervalFamily.build(2, {(1, 2): (2, 2)}, "tree-general-open")
        IntervalFamily.build(2, {(1, 2): (2, 2)}, "tree-general-closed")

    @pytest.mark.parametrize("variant", ["graph-closed", "tree-positive-open"])
    def test_positive_variants_need_positive_bounds(self, variant):
        with pytest.raises(PreconditionError, match="positive"):
            IntervalFamily.build(2, {(1, 2): (0, 1)}, variant)

    def test_general_variants_allow_negative_bounds(self):
        f = IntervalFamily.build(2, {(1, 2): (-3, -1)}, "tree-general-open")
        assert f.lo(2, 1) == -3

    def test_admits_respects_openness(self):
        closed = IntervalFamily.build(2, {(1, 2): (1, 2)}, "tree-general-closed")
        assert closed.admits((1, 2), Fraction(1)) and closed.admits((1, 2), Fraction(2))
        opened = closed.with_variant("tree-general-open")
        assert not opened.admits((1, 2), Fraction(1))
        assert opened.admits((1, 2), Fraction(3, 2))

    def test_variant_flags(self):
        assert Variant.GRAPH_CLOSED.positive and not Variant.GRAPH_CLOSED.is_tree
        assert Variant.TREE_POSITIVE_OPEN.positive and Variant.TREE_POSITIVE_OPEN.is_open
        assert not Variant.STAR_OPEN.positive and Variant.STAR_OPEN.is_open


class TestTreeStructure:
    def test_cycle_rejected(self):
        with pytest.raises(StructureError):
            WeightedTree(3, ((0, 1, 1), (1, 2, 1), (0, 2, 1)), (0, 1, 2))

    def test_disconnected_rejected(self):
        with pytest.raises(StructureError):
            WeightedTree(4, ((0, 1, 1), (2, 3, 1), (0, 1, 1)), (0, 1, 2, 3))

    def test_labeled_internal_vertex_rejected(self):
        with pytest.raises(StructureError, match="expected a leaf"):
            WeightedTree(4, ((0, 1, 1), (0, 2, 1), (0, 3, 1)), (0, 1, 2))

    def test_unlabeled_leaf_rejected(self):
        with pytest.raises(StructureError, match="unlabeled leaf"):
            WeightedTree(5, ((0, 3, 1), (1, 3, 1), (2, 3, 1), (3, 4, 1)), (0, 1, 2))

    def test_degree_two_rejected(self):
        with pytest.raises(StructureError, match="degree 2"):
            WeightedTree(3, ((0, 2, 1), (2, 1, 1)), (0, 1))

    def test_from_edges_suppresses_degree_two(self):
        t = WeightedTree.from_edges([(1, "v", 3), ("v", 2, -1)], {1: 1, 2: 2})
        assert t.vertex_count == 2 and t.edges == ((0, 1, Fraction(2)),)


def test_star_distances():
    star = WeightedTree.from_edges([("c", k, 1) for k in (1, 2, 3)], {k: k for k in (1, 2, 3)})
    assert tree_two_weights(star) == DissimilarityVector.from_mapping(3, {(1, 2): 2, (1, 3): 2, (2, 3): 2})


def test_quartet_tree_distances():
    d = tree_two_weights(quartet_tree())
    assert d[1, 2] == d[3, 4] == 2
    assert all(d[p] == 3 for p in [(1, 3), (1, 4), (2, 3), (2, 4)])


def test_two_edge_path_with_negative_weight():
    t = WeightedTree.from_edges([(1, "v", 3), ("v", 2, -1)], {1: 1, 2: 2})
    assert tree_two_weights(t)[1, 2] == 2


def test_graph_triangle_distances():
    g = WeightedGraph(3, ((0, 1, 5), (0, 2, 2), (1, 2, 2)), (0, 1, 2))
    d = graph_two_weights(g)
    assert (d[1, 2], d[1, 3], d[2, 3]) == (4, 2, 2)


def test_graph_metric_is_fixed_point():
    g = WeightedGraph(3, ((0, 1, 3), (0, 2, 2), (1, 2, 2)), (0, 1, 2))
    assert graph_two_weights(g) == DissimilarityVector.from_mapping(3, {(1, 2): 3, (1, 3): 2, (2, 3): 2})


def test_four_cycle_distances_match_path_enumeration():
    edges = ((0, 1, 1), (1, 2, 1), (2, 3, 1), (3, 0, 1))
    g = WeightedGraph(4, edges, (0, 1, 2, 3))
    expected = simple_path_distances(4, edges, (0, 1, 2, 3))
    assert expected == {(1, 2): 1, (2, 3): 1, (3, 4): 1, (1, 4): 1, (1, 3): 2, (2, 4): 2}
    assert dict(graph_two_weights(g).items()) == expected


def test_graph_distances_refuse_nonpositive_weight():
    g = WeightedGraph(2, ((0, 1, 0),), (0, 1))
    with pytest.raises(VariantError):
        graph_two_weights(g)


def test_check_distances_reports_each_pair():
    f = IntervalFamily.build(3, {(1, 2): (5, 5), (1, 3): (2, 2), (2, 3): (2, 2)}, "graph-closed")
    d = DissimilarityVector.from_mapping(3, {(1, 2): 4, (1, 3): 2, (2, 3): 2})
    report = check_distances(d, f)
    assert not report
    assert [r.pair for r in report.failures()] == [(1, 2)]


@given(general_trees(max_n=8))
def test_tree_distances_agree_with_path_enumeration(tree):
    assert dict(tree_two_weights(tree).items()) == tree_path_distances(tree)


@given(general_trees(min_n=4, max_n=8))
def test_four_point_condition(tree):
    d = tree_two_weights(tree)
    for a, b, c, e in itertools.combinations(range(1, tree.n + 1), 4):
        sums = [d[a, b] + d[c, e], d[a, c] + d[b, e], d[a, e] + d[b, c]]
        assert len(set(sums)) <= 2


@given(positive_trees(min_n=4, max_n=8))
def test_positive_four_point_max_attained_twice(tree):
    d = tree_two_weights(tree)
    for a, b, c, e in itertools.combinations(range(1, tree.n + 1), 4):
        sums = sorted([d[a, b] + d[c, e], d[a, c] + d[b, e], d[a, e] + d[b, c]])
        assert sums[1] == sums[2]


@given(positive_graphs())
def test_graph_distances_satisfy_triangle_inequalities(graph):
    d = graph_two_weights(graph)
    for i, j, k in itertools.permutations(range(1, graph.n + 1), 3):
        assert d[i, j] <= d[i, k] + d[k, j]


@settings(max_examples=50)
@given(positive_graphs(max_n=5))
def test_graph_distances_agree_with_path_enumeration(graph):
    assert dict(graph_two_weights(graph).items()) == simple_path_distances(graph.vertex_count, graph.edges, graph.labels)


@given(positive_trees())
def test_graph_distances_on_positive_tree_match_tree_distances(tree):
    assert graph_two_weights(tree.as_graph()) == tree_two_weights(tree)


@given(general_trees(), st.randoms(use_true_random=False))
def test_relabeling_vertices_keeps_canonical_form(tree, rnd):
    names = list(range(tree.vertex_count))
    rnd.shuffle(names)
    moved = [(names[u], names[v], w) for u, v, w in tree.edges]
    rebuilt = WeightedTree.from_edges(moved, {k: names[tree.leaves[k - 1]] for k in range(1, tree.n + 1)})
    assert rebuilt.canonical() == tree.canonical()
    assert tree_two_weights(rebuilt) == tree_two_weights(tree)
