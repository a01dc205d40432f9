import itertools
import random

import pytest

from errors import GraphError
from graph_core import (
	CompletedPath,
	Graph,
	TracePath,
	Violation,
	connected_components,
	find_ef_cut_edges,
	is_valid_color_class,
	shrink_vertex,
)
from helpers import class_ok_nx, complete_graph, cycle_graph, naive_bridges, path_graph, random_graph, star_graph, with_random_f


def test_from_edges_normalizes_and_defaults_f_to_e():
	g = Graph.from_edges(3, [(1, 0), (2, 1)])

	assert g.edges == {(0, 1), (1, 2)}
	assert g.f_edges == g.edges
	assert g.adj == ((1,), (0, 2), (1,))


@pytest.mark.parametrize(
	"edges",
	[
		[(0, 0)],
		[(0, 1), (1, 0)],
		[(0, 3)],
	],
)
def test_from_edges_rejects_bad_input(edges):
	with pytest.raises(GraphError):
		Graph.from_edges(3, edges)


def test_f_edges_must_be_subset_of_edges():
	with pytest.raises(GraphError):
		Graph.from_edges(3, [(0, 1)], [(1, 2)])


def test_from_flagged_splits_fusable():
	g = Graph.from_flagged(3, [(0, 1, True), (1, 2, False)])

	assert g.is_fusable(1, 0)
	assert not g.is_fusable(1, 2)
	assert g.has_edge(2, 1)


def test_induced_subgraph_keeps_flags_and_relabels():
	g = Graph.from_flagged(4, [(0, 1, True), (1, 3, False), (2, 3, True)])

	sub, local = g.induced_subgraph([3, 1, 2])

	assert local == {1: 0, 2: 1, 3: 2}
	assert sub.edges == {(0, 2), (1, 2)}
	assert sub.f_edges == {(1, 2)}


###############################################################################
# Colour classes
###############################################################################

def test_class_in_triangle_is_valid_for_k1():
	assert is_valid_color_class(complete_graph(3), {0, 1}, 1).valid


def test_long_path_class_reports_path_too_long():
	verdict = is_valid_color_class(path_graph(3), {0, 1, 2}, 1)

	assert not verdict.valid
	assert verdict.violation is Violation.PATH_TOO_LONG
	assert verdict.witness == (0, 1, 2)


def test_empty_class_is_valid():
	assert is_valid_color_class(complete_graph(4), set(), 0).valid


def test_non_f_edge_is_reported_with_the_edge():
	g = Graph.from_edges(2, [(0, 1)], [])

	verdict = is_valid_color_class(g, {0, 1}, 2)

	assert verdict.violation is Violation.NON_F_EDGE
	assert verdict.witness == (0, 1)


def test_degree_and_cycle_violations():
	assert is_valid_color_class(star_graph(3), {0, 1, 2, 3}, 5).violation is Violation.VERTEX_DEGREE_GT_2
	assert is_valid_color_class(cycle_graph(4), {0, 1, 2, 3}, 5).violation is Violation.CYCLE


def test_out_of_range_vertex_is_an_input_error():
	with pytest.raises(GraphError):
		is_valid_color_class(path_graph(2), {5}, 1)


def test_k0_classes_are_exactly_independent_sets():
	rng = random.Random(7)
	for _ in range(30):
		g = random_graph(rng, 7, 0.4)
		for size in range(4):
			for members in itertools.combinations(range(g.n), size):
				independent = not any(g.has_edge(u, v) for u, v in itertools.combinations(members, 2))
				assert is_valid_color_class(g, members, 0).valid == independent


def test_class_check_agrees_with_networkx_view():
	rng = random.Random(11)
	for _ in range(40):
		g = with_random_f(rng, random_graph(rng, 8, 0.35))
		for k in range(4):
			members = [v for v in range(g.n) if rng.random() < 0.6]
			assert is_valid_color_class(g, members, k).valid == class_ok_nx(g, members, k)


###############################################################################
# Traces
###############################################################################

def test_shrink_interior_vertex_merges_weights():
	t = TracePath((0, 1, 2), (1, 1))

	assert shrink_vertex(t, 1) == TracePath((0, 2), (2,))


def test_shrink_end_vertex_moves_weight_into_dangle():
	t = TracePath((0, 1), (1,), 0, 3)

	assert shrink_vertex(t, 1) == TracePath((0,), (), 0, 4)


def test_shrink_last_bag_vertex_completes_the_path():
	assert shrink_vertex(TracePath((0,), (), 1, 0), 0) == CompletedPath(1)


def test_shrink_preserves_total_length():
	t = TracePath((4, 2, 7, 1), (1, 3, 2), 2, 1)
	for v in t.bag_vertices:
		assert shrink_vertex(t, v).total_length == t.total_length


def test_shrink_unknown_vertex_raises():
	with pytest.raises(ValueError):
		shrink_vertex(TracePath((0, 1), (1,)), 5)


def test_trace_shape_is_checked():
	with pytest.raises(ValueError):
		TracePath((0, 1), ())
	with pytest.raises(ValueError):
		TracePath(())


def test_canonical_picks_one_reading():
	t = TracePath((3, 1), (2,), 1, 0)

	assert t.canonical() == t.reversed().canonical()
	assert t.canonical().bag_vertices == (1, 3)


def test_trace_check_rejects_weight_one_non_f_pair():
	g = Graph.from_edges(3, [(0, 1), (1, 2)], [(0, 1)])

	TracePath((0, 1), (1,)).check(g, 1)
	with pytest.raises(ValueError):
		TracePath((1, 2), (1,)).check(g, 1)
	with pytest.raises(ValueError):
		TracePath((0, 1), (1,), 1, 0).check(g, 1)


###############################################################################
# Splits
###############################################################################

def test_components_of_two_disjoint_edges():
	g = Graph.from_edges(4, [(0, 2), (1, 3)])

	comps = connected_components(g)

	assert [c.n for c, _ in comps] == [2, 2]
	assert comps[0][1] == {0: 0, 2: 1}
	assert comps[1][1] == {1: 0, 3: 1}


def test_connected_graph_is_its_own_component():
	g = cycle_graph(5)

	(comp, local), = connected_components(g)

	assert comp == g
	assert local == {v: v for v in range(5)}


def test_edgeless_graph_gives_singletons():
	assert [c.n for c, _ in connected_components(Graph.from_edges(3, []))] == [1, 1, 1]


def test_cut_edges_examples():
	g = Graph.from_edges(3, [(0, 1), (1, 2)], [(0, 1)])

	assert find_ef_cut_edges(g) == [(1, 2)]
	assert find_ef_cut_edges(Graph.from_edges(3, [(0, 1), (1, 2), (0, 2)], [])) == []
	assert find_ef_cut_edges(star_graph(3)) == []


def test_cut_edges_match_naive_bridges():
	rng = random.Random(3)
	for _ in range(40):
		g = with_random_f(rng, random_graph(rng, 9, 0.25), keep=0.5)
		expected = sorted(e for e in naive_bridges(g) if e not in g.f_edges)
		assert find_ef_cut_edges(g) == expected
