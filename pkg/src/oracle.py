from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from errors import ColoringError, OracleCapError, SolverError
from graph_core import ColorClassVerdict, Graph, Violation, is_valid_color_class


DEFAULT_ORACLE_CAP = 15


###############################################################################
# Colourings
###############################################################################

@dataclass(frozen=True)
class Coloring:
	"""Colour of every vertex 0..n-1, each in 0..num_colors-1."""

	assignment: tuple[int, ...]
	num_colors: int

	@classmethod
	def from_mapping(cls, n: int, mapping: Mapping[int, int], num_colors: int | None = None) -> Coloring:
		missing = [v for v in range(n) if v not in mapping]
		if missing:
			raise ColoringError(f"no colour for vertices {missing[:5]}")
		extra = sorted(v for v in mapping if not 0 <= v < n)
		if extra:
			raise ColoringError(f"colour given for unknown vertices {extra[:5]}")
		assignment = tuple(mapping[v] for v in range(n))
		if num_colors is None:
			num_colors = max(assignment, default=-1) + 1
		return cls(assignment, num_colors)

	@property
	def n(self) -> int:
		return len(self.assignment)

	def used_colors(self) -> int:
		return len(set(self.assignment))

	def classes(self) -> dict[int, list[int]]:
		out: dict[int, list[int]] = {}
		for v, c in enumerate(self.assignment):
			out.setdefault(c, []).append(v)
		return dict(sorted(out.items()))


@dataclass(frozen=True)
class ColoringVerdict:
	valid: bool
	class_verdicts: dict[int, ColorClassVerdict]

	def first_violation(self) -> tuple[int, ColorClassVerdict] | None:
		for c, verdict in self.class_verdicts.items():
			if not verdict.valid:
				return c, verdict
		return None


def verify_coloring(g: Graph, coloring: Coloring, k: int) -> ColoringVerdict:
	"""
	Check every colour class of `coloring`. The colouring must cover exactly
	the vertices of G and use colours below `num_colors`.
	"""
	if coloring.n != g.n:
		raise ColoringError(f"colouring covers {coloring.n} vertices, graph has {g.n}")
	for v, c in enumerate(coloring.assignment):
		if not 0 <= c < coloring.num_colors:
			raise ColoringError(f"vertex {v} has colour {c} outside 0..{coloring.num_colors - 1}")
	verdicts = {c: is_valid_color_class(g, members, k) for c, members in coloring.classes().items()}
	return ColoringVerdict(all(v.valid for v in verdicts.values()), verdicts)


###############################################################################
# Brute force
###############################################################################

def _search_order(g: Graph) -> list[int]:
	"""Breadth-first from vertex 0, other components appended in id order."""
	order: list[int] = []
	seen: set[int] = set()
	for root in range(g.n):
		if root in seen:
			continue
		seen.add(root)
		queue = [root]
		while queue:
			v = queue.pop(0)
			order.append(v)
			for u in g.adj[v]:
				if u not in seen:
					seen.add(u)
					queue.append(u)
	return order


def brute_force_decide(
	g: Graph,
	k: int,
	L: int,
	cap: int = DEFAULT_ORACLE_CAP,
) -> Coloring | None:
	"""
	Exhaustive search for a k-path L-colouring; returns one or None.

	Colours are handed out in first-use order, so the first vertex always
	gets colour 0. A partial class that is already invalid stays invalid,
	so branches are cut as soon as the extended class fails.
	"""
	if g.n > cap:
		raise OracleCapError(f"brute force is limited to {cap} vertices, graph has {g.n}")
	if g.n == 0:
		return Coloring((), max(L, 0))
	if L < 1:
		return None

	order = _search_order(g)
	colors = [-1] * g.n
	members: list[list[int]] = [[] for _ in range(L)]

	# explicit stack of (position, next colour to try)
	stack = [[0, 0]]
	while stack:
		frame = stack[-1]
		pos, c = frame
		v = order[pos]
		if colors[v] != -1:
			members[colors[v]].pop()
			colors[v] = -1
		opened = max((colors[u] for u in order[:pos]), default=-1) + 1
		placed = False
		while c <= min(opened, L - 1):
			members[c].append(v)
			if is_valid_color_class(g, members[c], k).valid:
				colors[v] = c
				frame[1] = c + 1
				placed = True
				break
			members[c].pop()
			c += 1
		if not placed:
			stack.pop()
			continue
		if pos + 1 == g.n:
			return Coloring(tuple(colors), L)
		stack.append([pos + 1, 0])
	return None


def brute_force_chromatic(g: Graph, k: int, cap: int = DEFAULT_ORACLE_CAP) -> int:
	"""Smallest L for which `brute_force_decide` succeeds (0 for the empty graph)."""
	if g.n > cap:
		raise OracleCapError(f"brute force is limited to {cap} vertices, graph has {g.n}")
	for L in range(g.n + 1):
		if brute_force_decide(g, k, L, cap) is not None:
			return L
	raise SolverError("every graph is colourable with n colours")


__all__ = [
	"Coloring",
	"ColoringVerdict",
	"DEFAULT_ORACLE_CAP",
	"Violation",
	"brute_force_chromatic",
	"brute_force_decide",
	"verify_coloring",
]
