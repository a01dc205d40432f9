from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable

import networkx as nx

from errors import DecompositionError
from graph_core import Graph


###############################################################################
# Types
###############################################################################

class Strategy(str, Enum):
	MIN_DEGREE = "min_degree"
	MIN_FILL = "min_fill"
	BEST_OF_BOTH = "best_of_both"


@dataclass(frozen=True)
class TreeDecomposition:
	"""Bags X_1..X_n (indexed from 0) and the tree edges between bag indices."""

	bags: tuple[frozenset[int], ...]
	tree_edges: tuple[tuple[int, int], ...]

	def width(self) -> int:
		return max((len(b) for b in self.bags), default=0) - 1


class NodeKind(str, Enum):
	LEAF = "leaf"
	INTRODUCE = "introduce"
	FORGET = "forget"
	JOIN = "join"


@dataclass(frozen=True, slots=True)
class NiceNode:
	kind: NodeKind
	bag: frozenset[int]
	vertex: int | None = None       # the introduced / forgotten / leaf vertex
	children: tuple[int, ...] = ()


@dataclass(frozen=True)
class NiceTreeDecomposition:
	"""
	Rooted nice tree decomposition.

	Nodes are stored children-first: every child index is smaller than its
	parent index, so a forward scan visits the tree in post-order.
	"""

	nodes: tuple[NiceNode, ...]
	root: int
	parent: tuple[int | None, ...] = field(init=False, repr=False, compare=False)

	def __post_init__(self):
		parent: list[int | None] = [None] * len(self.nodes)
		for i, node in enumerate(self.nodes):
			for c in node.children:
				parent[c] = i
		object.__setattr__(self, "parent", tuple(parent))

	@property
	def bags(self) -> tuple[frozenset[int], ...]:
		return tuple(n.bag for n in self.nodes)

	def width(self) -> int:
		return max((len(n.bag) for n in self.nodes), default=0) - 1

	def to_tree_decomposition(self) -> TreeDecomposition:
		edges = tuple(
			(c, i)
			for i, node in enumerate(self.nodes)
			for c in node.children
		)
		return TreeDecomposition(self.bags, edges)

	def structure_problems(self) -> list[str]:
		"""Return every violation of the leaf/introduce/forget/join typing rules."""
		problems = []
		for i, node in enumerate(self.nodes):
			kids = node.children
			if any(c >= i for c in kids):
				problems.append(f"node {i}: child index not below parent")
				continue
			child_bags = [self.nodes[c].bag for c in kids]
			if node.kind is NodeKind.LEAF:
				if kids or node.bag != frozenset({node.vertex}):
					problems.append(f"node {i}: leaf must be childless with a single-vertex bag")
			elif node.kind is NodeKind.INTRODUCE:
				if len(kids) != 1 or node.vertex in child_bags[0] \
						or node.bag != child_bags[0] | {node.vertex}:
					problems.append(f"node {i}: bad introduce of {node.vertex}")
			elif node.kind is NodeKind.FORGET:
				if len(kids) != 1 or node.vertex not in child_bags[0] \
						or node.bag != child_bags[0] - {node.vertex}:
					problems.append(f"node {i}: bad forget of {node.vertex}")
			elif node.kind is NodeKind.JOIN:
				if len(kids) != 2 or any(b != node.bag for b in child_bags):
					problems.append(f"node {i}: join children must carry the same bag")
		roots = [i for i, p in enumerate(self.parent) if p is None]
		if self.nodes and roots != [self.root]:
			problems.append(f"expected single root {self.root}, found {roots}")
		return problems


def width(td: TreeDecomposition | NiceTreeDecomposition) -> int:
	"""Size of the largest bag minus one."""
	return td.width()


###############################################################################
# Elimination-ordering heuristics
###############################################################################

def _fill_in(nbrs: dict[int, set[int]], v: int) -> int:
	around = sorted(nbrs[v])
	missing = 0
	for i, a in enumerate(around):
		adj_a = nbrs[a]
		for b in around[i + 1:]:
			if b not in adj_a:
				missing += 1
	return missing


def _degree(nbrs: dict[int, set[int]], v: int) -> int:
	return len(nbrs[v])


def _eliminate(
	g: Graph,
	score: Callable[[dict[int, set[int]], int], int],
	second_ring: bool,
) -> tuple[list[int], list[frozenset[int]]]:
	"""
	Greedy elimination: repeatedly remove the vertex with the smallest score
	(lowest id on ties), turning its remaining neighbourhood into a clique.

	Scores live in a lazy heap; after an elimination only the neighbours (and,
	for fill-in, their neighbours too) are rescored.
	"""
	nbrs = {v: set(g.adj[v]) for v in range(g.n)}
	current = {v: score(nbrs, v) for v in range(g.n)}
	heap = [(s, v) for v, s in current.items()]
	heapq.heapify(heap)

	order: list[int] = []
	bags: list[frozenset[int]] = []
	while heap:
		s, v = heapq.heappop(heap)
		if v not in current or current[v] != s:
			continue
		del current[v]
		around = nbrs.pop(v)
		order.append(v)
		bags.append(frozenset(around | {v}))

		for a in around:
			nbrs[a].discard(v)
			nbrs[a] |= around - {a}

		touched = set(around)
		if second_ring:
			for a in around:
				touched |= nbrs[a]
		for u in touched:
			new_score = score(nbrs, u)
			if new_score != current[u]:
				current[u] = new_score
				heapq.heappush(heap, (new_score, u))
	return order, bags


def _decomposition_from_elimination(order: list[int], bags: list[frozenset[int]]) -> TreeDecomposition:
	"""
	Bag i belongs to order[i]; its parent is the bag of the earliest-eliminated
	vertex among its later neighbours. Parentless bags (one per connected
	component) are chained so the result is a single tree.
	"""
	position = {v: i for i, v in enumerate(order)}
	edges = []
	roots = []
	for i, v in enumerate(order):
		later = [position[u] for u in bags[i] if u != v]
		if later:
			edges.append((i, min(later)))
		else:
			roots.append(i)
	for a, b in zip(roots, roots[1:]):
		edges.append((a, b))
	return TreeDecomposition(tuple(bags), tuple(edges))


def elimination_ordering(g: Graph, strategy: Strategy | str) -> list[int]:
	return _run_strategy(g, Strategy(strategy))[0]


def _run_strategy(g: Graph, strategy: Strategy) -> tuple[list[int], list[frozenset[int]]]:
	if strategy is Strategy.MIN_DEGREE:
		return _eliminate(g, _degree, second_ring=False)
	if strategy is Strategy.MIN_FILL:
		return _eliminate(g, _fill_in, second_ring=True)
	raise ValueError(f"not a single elimination strategy: {strategy}")


def heuristic_decompose(g: Graph, strategy: Strategy | str = Strategy.BEST_OF_BOTH) -> TreeDecomposition:
	"""
	Build a tree decomposition from a greedy elimination ordering.

	`best_of_both` runs min-degree and min-fill and keeps the narrower result,
	preferring min-degree on a tie.
	"""
	strategy = Strategy(strategy)
	if strategy is Strategy.BEST_OF_BOTH:
		candidates = [
			_decomposition_from_elimination(*_run_strategy(g, s))
			for s in (Strategy.MIN_DEGREE, Strategy.MIN_FILL)
		]
		return min(candidates, key=lambda td: td.width())
	return _decomposition_from_elimination(*_run_strategy(g, strategy))


def exact_treewidth(g: Graph, max_vertices: int = 12) -> int:
	"""
	Exact treewidth by dynamic programming over vertex subsets (elimination
	prefixes). Exponential; only meant as a test oracle on tiny graphs.
	"""
	if g.n > max_vertices:
		raise DecompositionError(f"exact treewidth limited to {max_vertices} vertices, got {g.n}")
	if g.n == 0:
		return -1
	adj_mask = [0] * g.n
	for u, v in g.edges:
		adj_mask[u] |= 1 << v
		adj_mask[v] |= 1 << u

	def q_size(prefix: int, v: int) -> int:
		# vertices outside prefix ∪ {v} reachable from v through prefix
		seen = 1 << v
		frontier = adj_mask[v]
		reached = 0
		while frontier:
			bit = frontier & -frontier
			frontier ^= bit
			if seen & bit:
				continue
			seen |= bit
			if prefix & bit:
				frontier |= adj_mask[bit.bit_length() - 1] & ~seen
			else:
				reached |= bit
		return bin(reached).count("1")

	full = (1 << g.n) - 1
	best = [0] * (full + 1)
	best[0] = -1
	for s in range(1, full + 1):
		value = g.n
		rest = s
		while rest:
			bit = rest & -rest
			rest ^= bit
			v = bit.bit_length() - 1
			prefix = s ^ bit
			cand = max(best[prefix], q_size(prefix, v))
			if cand < value:
				value = cand
		best[s] = value
	return best[full]


###############################################################################
# Validation
###############################################################################

@dataclass(frozen=True)
class ValidationReport:
	ok: bool
	missing_vertices: tuple[int, ...] = ()
	unknown_vertices: tuple[int, ...] = ()
	missing_edges: tuple[tuple[int, int], ...] = ()
	disconnected_vertices: tuple[int, ...] = ()
	problems: tuple[str, ...] = ()

	def __bool__(self) -> bool:
		return self.ok


def _tree_problem(num_bags: int, tree_edges) -> str | None:
	if num_bags == 0:
		return "no bags" if tree_edges else None
	for a, b in tree_edges:
		if not (0 <= a < num_bags and 0 <= b < num_bags) or a == b:
			return f"tree edge ({a}, {b}) is not between two distinct bags"
	if len(tree_edges) != num_bags - 1:
		return f"{len(tree_edges)} tree edges for {num_bags} bags"
	t = nx.Graph()
	t.add_nodes_from(range(num_bags))
	t.add_edges_from(tree_edges)
	if not nx.is_tree(t):
		return "bag graph is not a tree"
	return None


def _occurrences(bags) -> dict[int, list[int]]:
	occ: dict[int, list[int]] = {}
	for i, bag in enumerate(bags):
		for v in bag:
			occ.setdefault(v, []).append(i)
	return occ


def _disconnected_vertices(bags, tree_edges) -> list[int]:
	t = nx.Graph()
	t.add_nodes_from(range(len(bags)))
	t.add_edges_from(tree_edges)
	return sorted(
		v for v, where in _occurrences(bags).items()
		if len(where) > 1 and not nx.is_connected(t.subgraph(where))
	)


def validate(g: Graph, td: TreeDecomposition) -> ValidationReport:
	"""
	Check vertex coverage, edge coverage, connected occurrence of every
	vertex, and that the bag graph is a tree.
	"""
	problems = []
	tree_problem = _tree_problem(len(td.bags), td.tree_edges)
	if tree_problem:
		problems.append(tree_problem)

	covered = set().union(*td.bags) if td.bags else set()
	missing_vertices = tuple(v for v in range(g.n) if v not in covered)
	unknown_vertices = tuple(sorted(v for v in covered if not 0 <= v < g.n))

	occ = {v: set(where) for v, where in _occurrences(td.bags).items()}
	missing_edges = tuple(
		(u, v) for u, v in g.sorted_edges()
		if not (occ.get(u, set()) & occ.get(v, set()))
	)

	disconnected: tuple[int, ...] = ()
	if not tree_problem:
		disconnected = tuple(_disconnected_vertices(td.bags, td.tree_edges))

	ok = not (problems or missing_vertices or unknown_vertices or missing_edges or disconnected)
	return ValidationReport(
		ok=ok,
		missing_vertices=missing_vertices,
		unknown_vertices=unknown_vertices,
		missing_edges=missing_edges,
		disconnected_vertices=disconnected,
		problems=tuple(problems),
	)


def validate_nice(g: Graph, ntd: NiceTreeDecomposition) -> ValidationReport:
	"""Validate both the tree-decomposition conditions and the nice typing rules."""
	base = validate(g, ntd.to_tree_decomposition())
	structure = ntd.structure_problems()
	if not structure:
		return base
	return ValidationReport(
		ok=False,
		missing_vertices=base.missing_vertices,
		unknown_vertices=base.unknown_vertices,
		missing_edges=base.missing_edges,
		disconnected_vertices=base.disconnected_vertices,
		problems=base.problems + tuple(structure),
	)


###############################################################################
# Nice tree decompositions
###############################################################################

def _compress(td: TreeDecomposition) -> tuple[dict[int, frozenset[int]], dict[int, set[int]]]:
	"""Contract every tree edge whose one bag is a subset of the other."""
	bags = dict(enumerate(td.bags))
	nbrs: dict[int, set[int]] = {i: set() for i in bags}
	for a, b in td.tree_edges:
		nbrs[a].add(b)
		nbrs[b].add(a)

	pending = list(td.tree_edges)
	while pending:
		a, b = pending.pop()
		if a not in bags or b not in bags or b not in nbrs[a]:
			continue
		if bags[a] <= bags[b]:
			keep, drop = b, a
		elif bags[b] <= bags[a]:
			keep, drop = a, b
		else:
			continue
		nbrs[keep].discard(drop)
		for c in nbrs.pop(drop):
			if c == keep:
				continue
			nbrs[c].discard(drop)
			nbrs[c].add(keep)
			nbrs[keep].add(c)
			pending.append((keep, c))
		del bags[drop]
	return bags, nbrs


class _NiceBuilder:
	def __init__(self):
		self.nodes: list[NiceNode] = []

	def add(self, kind: NodeKind, bag: frozenset[int], vertex: int | None, children: tuple[int, ...]) -> int:
		self.nodes.append(NiceNode(kind, bag, vertex, children))
		return len(self.nodes) - 1

	def leaf_chain(self, bag: frozenset[int]) -> int:
		first, *rest = sorted(bag)
		idx = self.add(NodeKind.LEAF, frozenset({first}), first, ())
		return self.introduce(idx, frozenset({first}), rest)

	def introduce(self, idx: int, current: frozenset[int], vertices) -> int:
		for v in vertices:
			current = current | {v}
			idx = self.add(NodeKind.INTRODUCE, current, v, (idx,))
		return idx

	def forget(self, idx: int, current: frozenset[int], vertices) -> int:
		for v in vertices:
			current = current - {v}
			idx = self.add(NodeKind.FORGET, current, v, (idx,))
		return idx


def make_nice(td: TreeDecomposition, g: Graph | None = None) -> NiceTreeDecomposition:
	"""
	Convert a tree decomposition into a nice one of the same width.

	Bags that are subsets of a neighbour are contracted first. The root is the
	lowest-index bag holding the smallest vertex; children are visited by bag
	index. Below a bag B with several children, every child is reduced to
	J = B ∩ (children's bags), the branches are joined on J, and the rest of B
	is introduced above the joins. A childless child whose bag fits together
	with B inside the width is threaded into B's chain (introduce, then forget
	its private vertices) instead of opening another branch.
	"""
	if g is not None:
		report = validate(g, td)
		if not report:
			raise DecompositionError(f"invalid tree decomposition: {report}")
	else:
		problem = _tree_problem(len(td.bags), td.tree_edges)
		if problem:
			raise DecompositionError(f"invalid tree decomposition: {problem}")
		broken = _disconnected_vertices(td.bags, td.tree_edges)
		if broken:
			raise DecompositionError(f"vertices with disconnected occurrence: {broken[:5]}")

	bags, nbrs = _compress(td)
	if not bags or not any(bags.values()):
		raise DecompositionError("cannot build a nice decomposition without vertices")
	max_size = td.width() + 1

	lowest = min(min(b) for b in bags.values() if b)
	root = min(i for i, b in bags.items() if lowest in b)

	children: dict[int, list[int]] = {}
	visit = [root]
	seen = {root}
	order = []
	while visit:
		t = visit.pop()
		order.append(t)
		kids = sorted(c for c in nbrs[t] if c not in seen)
		seen.update(kids)
		children[t] = kids
		visit.extend(reversed(kids))

	threads: dict[int, list[int]] = {}
	threaded_bags: set[int] = set()
	for t in order:
		threads[t] = [
			c for c in children[t]
			if not children[c] and len(bags[t] | bags[c]) <= max_size
		]
		threaded_bags.update(threads[t])

	builder = _NiceBuilder()
	top: dict[int, int] = {}
	for t in reversed(order):
		if t in threaded_bags:
			continue
		bag = bags[t]
		threaded = threads[t]
		branch = [c for c in children[t] if c not in threaded_bags]

		if not branch:
			idx = builder.leaf_chain(bag)
		else:
			joint = bag & frozenset().union(*(bags[c] for c in branch))
			tops = []
			for c in branch:
				cb = bags[c]
				i = builder.forget(top.pop(c), cb, sorted(cb - joint))
				i = builder.introduce(i, cb & joint, sorted(joint - cb))
				tops.append(i)
			idx = tops[0]
			for other in tops[1:]:
				idx = builder.add(NodeKind.JOIN, joint, None, (idx, other))
			idx = builder.introduce(idx, joint, sorted(bag - joint))

		for c in threaded:
			private = sorted(bags[c] - bag)
			idx = builder.introduce(idx, bag, private)
			idx = builder.forget(idx, bag | frozenset(private), private)
		top[t] = idx

	return NiceTreeDecomposition(tuple(builder.nodes), top[root])


def nice_bag_bound(n: int, w: int) -> int:
	"""
	Node count `make_nice` stays within on sparse inputs (paths, cycles,
	strips, trees). Dense graphs whose bags branch a lot can go over.
	"""
	return 4 * n + 4 * max(w, 0)


def nice_node_limit(n: int, w: int) -> int:
	"""
	Node count `make_nice` never exceeds on an n-vertex graph of width w.

	After contraction there are at most n bags. Every vertex is forgotten at
	most once, and a threaded private vertex is introduced once. Leaf chains
	and the introduces below and above joins add at most w + 1 nodes per bag
	and per branch edge, and there is one join per extra branch.
	"""
	return (2 * max(w, 0) + 5) * n


###############################################################################
# PACE .td text format
###############################################################################

def serialize_td(td: TreeDecomposition, n: int) -> str:
	"""
	Write `s td <bags> <max bag size> <n>`, one `b <id> <v...>` line per bag
	and one `<id1> <id2>` line per tree edge. Bag ids and vertex ids are
	1-based, bag vertices sorted.
	"""
	max_size = max((len(b) for b in td.bags), default=0)
	lines = [f"s td {len(td.bags)} {max_size} {n}"]
	for i, bag in enumerate(td.bags, start=1):
		lines.append(" ".join(["b", str(i), *(str(v + 1) for v in sorted(bag))]))
	for a, b in td.tree_edges:
		lines.append(f"{a + 1} {b + 1}")
	return "\n".join(lines) + "\n"


def parse_td(text: str) -> tuple[TreeDecomposition, int]:
	"""Parse PACE .td text into (decomposition, vertex count)."""
	header = None
	bags: dict[int, frozenset[int]] = {}
	edges = []
	for line_no, raw in enumerate(text.splitlines(), start=1):
		line = raw.strip()
		if not line or line.startswith("c"):
			continue
		parts = line.split()
		try:
			if parts[0] == "s":
				if header is not None or parts[1] != "td" or len(parts) != 5:
					raise DecompositionError(f"line {line_no}: bad header")
				header = tuple(int(x) for x in parts[2:])
			elif parts[0] == "b":
				bag_id = int(parts[1])
				bags[bag_id] = frozenset(int(x) - 1 for x in parts[2:])
			else:
				a, b = (int(x) for x in parts)
				edges.append((a - 1, b - 1))
		except ValueError:
			raise DecompositionError(f"line {line_no}: cannot parse {raw!r}") from None
	if header is None:
		raise DecompositionError("missing 's td' header")
	num_bags, max_size, n = header
	if sorted(bags) != list(range(1, num_bags + 1)):
		raise DecompositionError(f"expected bags 1..{num_bags}")
	ordered = tuple(bags[i] for i in range(1, num_bags + 1))
	if max((len(b) for b in ordered), default=0) != max_size:
		raise DecompositionError("header max bag size does not match the bags")
	return TreeDecomposition(ordered, tuple(edges)), n
