from __future__ import annotations

from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable

import networkx as nx

from errors import GraphError


Edge = tuple[int, int]


def edge_key(u: int, v: int) -> Edge:
	"""Normalize an unordered pair to (smaller, larger)."""
	return (u, v) if u < v else (v, u)


###############################################################################
# Graph
###############################################################################

@dataclass(frozen=True)
class Graph:
	"""
	Simple undirected graph on vertices 0..n-1 with a distinguished subset
	of fusable edges F.

	Edges are stored as normalized pairs (u < v). `adj` is derived and kept
	sorted so every traversal is deterministic.
	"""

	n: int
	edges: frozenset[Edge]
	f_edges: frozenset[Edge]
	adj: tuple[tuple[int, ...], ...] = field(init=False, repr=False, compare=False)

	def __post_init__(self):
		if self.n < 0:
			raise GraphError(f"vertex count must be nonnegative, got {self.n}")
		neighbors: list[list[int]] = [[] for _ in range(self.n)]
		for u, v in self.edges:
			if u == v:
				raise GraphError(f"self-loop on vertex {u}")
			if u > v:
				raise GraphError(f"edge ({u}, {v}) is not normalized")
			if u < 0 or v >= self.n:
				raise GraphError(f"edge ({u}, {v}) out of range for n={self.n}")
			neighbors[u].append(v)
			neighbors[v].append(u)
		if not self.f_edges <= self.edges:
			extra = sorted(self.f_edges - self.edges)
			raise GraphError(f"fusable edges not in E: {extra[:5]}")
		object.__setattr__(self, "adj", tuple(tuple(sorted(nb)) for nb in neighbors))

	@classmethod
	def from_edges(
		cls,
		n: int,
		edges: Iterable[Edge],
		f_edges: Iterable[Edge] | None = None,
	) -> Graph:
		"""
		Build a graph from raw vertex pairs.

		Pairs may come in either orientation. Duplicates and self-loops are
		rejected. When `f_edges` is None every edge is fusable (F = E).
		"""
		normalized: set[Edge] = set()
		for u, v in edges:
			if u == v:
				raise GraphError(f"self-loop on vertex {u}")
			key = edge_key(u, v)
			if key in normalized:
				raise GraphError(f"duplicate edge {key}")
			normalized.add(key)
		if f_edges is None:
			fusable = frozenset(normalized)
		else:
			fusable = frozenset(edge_key(u, v) for u, v in f_edges)
		return cls(n=n, edges=frozenset(normalized), f_edges=fusable)

	@classmethod
	def from_flagged(cls, n: int, flagged: Iterable[tuple[int, int, bool]]) -> Graph:
		"""Build a graph from (u, v, is_fusable) triples."""
		flagged = list(flagged)
		return cls.from_edges(
			n,
			[(u, v) for u, v, _ in flagged],
			[(u, v) for u, v, f in flagged if f],
		)

	@property
	def m(self) -> int:
		return len(self.edges)

	def check_vertex(self, v: int) -> None:
		if not 0 <= v < self.n:
			raise GraphError(f"vertex {v} out of range for n={self.n}")

	def has_edge(self, u: int, v: int) -> bool:
		return edge_key(u, v) in self.edges

	def is_fusable(self, u: int, v: int) -> bool:
		return edge_key(u, v) in self.f_edges

	def degree(self, v: int) -> int:
		return len(self.adj[v])

	def max_degree(self) -> int:
		return max((len(nb) for nb in self.adj), default=0)

	def sorted_edges(self) -> list[Edge]:
		return sorted(self.edges)

	def to_networkx(self) -> nx.Graph:
		"""Return a networkx view with a boolean `fusable` edge attribute."""
		h = nx.Graph()
		h.add_nodes_from(range(self.n))
		for u, v in self.sorted_edges():
			h.add_edge(u, v, fusable=(u, v) in self.f_edges)
		return h

	def induced_subgraph(self, vertices: Iterable[int]) -> tuple[Graph, dict[int, int]]:
		"""
		Return the subgraph induced by `vertices`, relabelled to 0..len-1
		in increasing original order, together with the original -> local map.
		"""
		ordered = sorted(set(vertices))
		for v in ordered:
			self.check_vertex(v)
		local = {v: i for i, v in enumerate(ordered)}
		edges = set()
		fusable = set()
		for v in ordered:
			for u in self.adj[v]:
				if u > v and u in local:
					key = (local[v], local[u])
					edges.add(key)
					if (v, u) in self.f_edges:
						fusable.add(key)
		sub = Graph(n=len(ordered), edges=frozenset(edges), f_edges=frozenset(fusable))
		return sub, local


###############################################################################
# Colour-class validity
###############################################################################

class Violation(str, Enum):
	NON_F_EDGE = "non_f_edge"
	VERTEX_DEGREE_GT_2 = "vertex_degree_gt_2"
	CYCLE = "cycle"
	PATH_TOO_LONG = "path_too_long"


@dataclass(frozen=True)
class ColorClassVerdict:
	valid: bool
	violation: Violation | None = None
	witness: tuple[int, ...] = ()

	def __post_init__(self):
		if self.valid != (self.violation is None):
			raise ValueError("valid must be true exactly when no violation is recorded")


VALID_CLASS = ColorClassVerdict(valid=True)


def is_valid_color_class(g: Graph, class_vertices: Iterable[int], k: int) -> ColorClassVerdict:
	"""
	Check that the subgraph of G induced by `class_vertices` is a disjoint
	union of F-paths with at most k edges each.

	Violations are reported in a fixed order: non-F edge, degree above two,
	cycle, then over-long path. The witness is the offending edge, the vertex
	followed by its class neighbours, or the sorted vertex set of the
	offending component.
	"""
	if k < 0:
		raise GraphError(f"k must be nonnegative, got {k}")
	members = set(class_vertices)
	for v in members:
		g.check_vertex(v)

	order = sorted(members)
	neighbors: dict[int, list[int]] = {v: [] for v in order}
	for v in order:
		for u in g.adj[v]:
			if u > v and u in members:
				if (v, u) not in g.f_edges:
					return ColorClassVerdict(False, Violation.NON_F_EDGE, (v, u))
				neighbors[v].append(u)
				neighbors[u].append(v)

	for v in order:
		if len(neighbors[v]) > 2:
			return ColorClassVerdict(
				False,
				Violation.VERTEX_DEGREE_GT_2,
				(v, *sorted(neighbors[v])),
			)

	seen: set[int] = set()
	for start in order:
		if start in seen:
			continue
		component = [start]
		seen.add(start)
		stack = [start]
		while stack:
			x = stack.pop()
			for y in neighbors[x]:
				if y not in seen:
					seen.add(y)
					component.append(y)
					stack.append(y)
		edge_count = sum(len(neighbors[x]) for x in component) // 2
		if edge_count >= len(component):
			return ColorClassVerdict(False, Violation.CYCLE, tuple(sorted(component)))
		if edge_count > k:
			return ColorClassVerdict(False, Violation.PATH_TOO_LONG, tuple(sorted(component)))

	return VALID_CLASS


###############################################################################
# Traces
###############################################################################

@dataclass(frozen=True, slots=True)
class TracePath:
	"""
	Trace of one monochromatic path on the current bag.

	`bag_vertices` are the path's bag vertices in path order, `weights[i]`
	the number of G-edges between bag_vertices[i] and bag_vertices[i+1],
	and the dangles the lengths of the forgotten tails hanging off each end.
	A dangle of 0 means the end bag vertex is the path's true extremity.
	"""

	bag_vertices: tuple[int, ...]
	weights: tuple[int, ...] = ()
	left_dangle: int = 0
	right_dangle: int = 0

	def __post_init__(self):
		if not self.bag_vertices:
			raise ValueError("a trace path needs at least one bag vertex")
		if len(self.weights) != len(self.bag_vertices) - 1:
			raise ValueError("one weight per consecutive pair of bag vertices")

	@classmethod
	def single(cls, v: int) -> TracePath:
		return cls((v,))

	@property
	def total_length(self) -> int:
		return self.left_dangle + sum(self.weights) + self.right_dangle

	@property
	def first(self) -> int:
		return self.bag_vertices[0]

	@property
	def last(self) -> int:
		return self.bag_vertices[-1]

	def reversed(self) -> TracePath:
		return TracePath(
			self.bag_vertices[::-1],
			self.weights[::-1],
			self.right_dangle,
			self.left_dangle,
		)

	def canonical(self) -> TracePath:
		"""Orient the path by the smaller (vertex sequence, dangles) reading."""
		rev_vertices = self.bag_vertices[::-1]
		if (rev_vertices, (self.right_dangle, self.left_dangle)) < (
			self.bag_vertices,
			(self.left_dangle, self.right_dangle),
		):
			return self.reversed()
		return self

	def sort_key(self) -> tuple:
		return (self.bag_vertices, self.left_dangle, self.right_dangle, self.weights)

	def check(self, g: Graph, k: int) -> None:
		"""Raise ValueError unless this trace is consistent with G and k."""
		if len(set(self.bag_vertices)) != len(self.bag_vertices):
			raise ValueError(f"repeated bag vertex in {self.bag_vertices}")
		if self.left_dangle < 0 or self.right_dangle < 0:
			raise ValueError("dangles must be nonnegative")
		for (a, b), w in zip(zip(self.bag_vertices, self.bag_vertices[1:]), self.weights):
			if w < 1:
				raise ValueError(f"weight {w} between {a} and {b} is not positive")
			if w == 1 and not g.is_fusable(a, b):
				raise ValueError(f"weight-1 trace edge ({a}, {b}) is not an F-edge of G")
		if self.total_length > k:
			raise ValueError(f"trace length {self.total_length} exceeds k={k}")


@dataclass(frozen=True)
class CompletedPath:
	"""A path whose bag vertices have all been forgotten."""
	total_length: int


def shrink_vertex(t: TracePath, v: int) -> TracePath | CompletedPath:
	"""
	Remove bag vertex `v` from the trace: interior vertices merge their two
	weights, end vertices push their weight into the dangle, and a lone bag
	vertex completes the path.
	"""
	try:
		pos = t.bag_vertices.index(v)
	except ValueError:
		raise ValueError(f"vertex {v} is not on trace {t.bag_vertices}") from None

	vertices = t.bag_vertices
	weights = t.weights
	if len(vertices) == 1:
		return CompletedPath(t.total_length)
	if pos == 0:
		return TracePath(vertices[1:], weights[1:], t.left_dangle + weights[0], t.right_dangle)
	if pos == len(vertices) - 1:
		return TracePath(vertices[:-1], weights[:-1], t.left_dangle, t.right_dangle + weights[-1])
	merged = weights[pos - 1] + weights[pos]
	return TracePath(
		vertices[:pos] + vertices[pos + 1:],
		weights[:pos - 1] + (merged,) + weights[pos + 1:],
		t.left_dangle,
		t.right_dangle,
	)


###############################################################################
# Structural splits
###############################################################################

def connected_components(g: Graph) -> list[tuple[Graph, dict[int, int]]]:
	"""
	Split G into connected components, each relabelled to 0..n_i-1.

	Components are ordered by their smallest original vertex; the map goes
	from original to local ids.
	"""
	groups = sorted(
		(sorted(c) for c in nx.connected_components(g.to_networkx())),
		key=lambda c: c[0],
	)
	return [g.induced_subgraph(c) for c in groups]


def find_ef_cut_edges(g: Graph) -> list[Edge]:
	"""Return the bridges of G that are not fusable, sorted."""
	bridges = (edge_key(u, v) for u, v in nx.bridges(g.to_networkx()))
	return sorted(e for e in bridges if e not in g.f_edges)
