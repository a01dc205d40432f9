from __future__ import annotations

import random
from functools import lru_cache

import networkx as nx

from graph_core import Graph


def path_graph(n: int, fusable: bool = True) -> Graph:
	edges = [(i, i + 1) for i in range(n - 1)]
	return Graph.from_edges(n, edges, edges if fusable else [])


def cycle_graph(n: int, fusable: bool = True) -> Graph:
	edges = [(i, (i + 1) % n) for i in range(n)]
	return Graph.from_edges(n, edges, edges if fusable else [])


def complete_graph(n: int, fusable: bool = True) -> Graph:
	edges = [(i, j) for i in range(n) for j in range(i + 1, n)]
	return Graph.from_edges(n, edges, edges if fusable else [])


def star_graph(leaves: int) -> Graph:
	return Graph.from_edges(leaves + 1, [(0, i) for i in range(1, leaves + 1)])


def triangle_strip(n: int) -> Graph:
	edges = [(i, i + 1) for i in range(n - 1)] + [(i, i + 2) for i in range(n - 2)]
	return Graph.from_edges(n, edges)


def from_networkx(h: nx.Graph) -> Graph:
	"""Relabel to 0..n-1 in sorted node order; every edge fusable."""
	index = {v: i for i, v in enumerate(sorted(h.nodes))}
	return Graph.from_edges(len(index), [(index[u], index[v]) for u, v in h.edges])


def random_graph(rng: random.Random, n: int, p: float, connected: bool = False) -> Graph:
	"""G(n, p); with `connected`, a random spanning tree is laid down first."""
	edges = set()
	if connected:
		for v in range(1, n):
			u = rng.randrange(v)
			edges.add((u, v))
	for u in range(n):
		for v in range(u + 1, n):
			if rng.random() < p:
				edges.add((u, v))
	return Graph.from_edges(n, sorted(edges))


def with_random_f(rng: random.Random, g: Graph, keep: float = 0.6) -> Graph:
	edges = g.sorted_edges()
	return Graph.from_edges(g.n, edges, [e for e in edges if rng.random() < keep])


def all_f_subsets(g: Graph):
	edges = g.sorted_edges()
	for mask in range(1 << len(edges)):
		yield Graph.from_edges(g.n, edges, [e for i, e in enumerate(edges) if mask >> i & 1])


def class_ok_nx(g: Graph, members, k: int) -> bool:
	"""Colour-class check written against networkx only."""
	h = g.to_networkx().subgraph(members)
	if any(not data["fusable"] for _, _, data in h.edges(data=True)):
		return False
	for comp in nx.connected_components(h):
		sub = h.subgraph(comp)
		if not nx.is_tree(sub) or max(d for _, d in sub.degree) > 2:
			return False
		if sub.number_of_edges() > k:
			return False
	return True


def coloring_ok_nx(g: Graph, assignment, k: int) -> bool:
	classes: dict[int, list[int]] = {}
	for v, c in enumerate(assignment):
		classes.setdefault(c, []).append(v)
	return all(class_ok_nx(g, members, k) for members in classes.values())


def classical_chromatic(g: Graph) -> int:
	"""χ(G) by removing maximal independent sets, memoised over vertex sets."""
	h = g.to_networkx()

	@lru_cache(maxsize=None)
	def solve(vertices: frozenset) -> int:
		if not vertices:
			return 0
		complement = nx.complement(h.subgraph(vertices))
		return 1 + min(solve(vertices - frozenset(s)) for s in nx.find_cliques(complement))

	return solve(frozenset(range(g.n)))


def naive_bridges(g: Graph) -> set[tuple[int, int]]:
	h = g.to_networkx()
	base = nx.number_connected_components(h)
	out = set()
	for u, v in g.sorted_edges():
		h.remove_edge(u, v)
		if nx.number_connected_components(h) > base:
			out.add((u, v))
		h.add_edge(u, v)
	return out
