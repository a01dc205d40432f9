from __future__ import annotations

import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import repeat
from typing import Iterable, Iterator, Sequence

from errors import DecompositionError, SolverError, SolverTimeout
from graph_core import (
	CompletedPath,
	Edge,
	Graph,
	TracePath,
	connected_components,
	edge_key,
	find_ef_cut_edges,
	shrink_vertex,
)
from oracle import Coloring, verify_coloring
from tree_decomp import (
	NiceTreeDecomposition,
	NodeKind,
	Strategy,
	heuristic_decompose,
	make_nice,
	validate_nice,
)


###############################################################################
# Partial solutions
###############################################################################

@dataclass(frozen=True, slots=True)
class PartialSolution:
	"""
	Colouring of the bag plus the traces of every monochromatic path that
	touches the bag.

	`coloring` is a tuple of (vertex, colour) pairs sorted by vertex. Traces
	carry no colour: a trace's colour is the colour of its bag vertices.
	Traces are canonically oriented and sorted, so equal solutions compare
	and hash equal.
	"""

	coloring: tuple[tuple[int, int], ...]
	traces: tuple[TracePath, ...]

	def color_of(self, v: int) -> int:
		for u, c in self.coloring:
			if u == v:
				return c
		raise KeyError(v)

	@property
	def bag(self) -> frozenset[int]:
		return frozenset(v for v, _ in self.coloring)

	@property
	def bag_coloring(self) -> dict[int, int]:
		return dict(self.coloring)

	@property
	def color_traces(self) -> dict[int, tuple[TracePath, ...]]:
		colors = dict(self.coloring)
		grouped: dict[int, list[TracePath]] = {}
		for t in self.traces:
			grouped.setdefault(colors[t.first], []).append(t)
		return {c: tuple(ts) for c, ts in sorted(grouped.items())}

	def sort_key(self) -> tuple:
		return (self.coloring, tuple(t.sort_key() for t in self.traces))


def _identity(L: int) -> tuple[int, ...]:
	return tuple(range(L))


def _normalize(coloring: tuple[tuple[int, int], ...], L: int) -> tuple[tuple[tuple[int, int], ...], tuple[int, ...]]:
	"""
	Relabel colours in first-use order over the sorted bag. Returns the new
	colouring and the full permutation old label -> new label on 0..L-1.
	"""
	mapping: dict[int, int] = {}
	for _, c in coloring:
		if c not in mapping:
			mapping[c] = len(mapping)
	label = len(mapping)
	for c in range(L):
		if c not in mapping:
			mapping[c] = label
			label += 1
	perm = tuple(mapping[c] for c in range(L))
	return tuple((v, perm[c]) for v, c in coloring), perm


def _build(
	coloring: tuple[tuple[int, int], ...],
	paths: Iterable[TracePath],
	L: int,
	symmetry: bool,
) -> tuple[PartialSolution, tuple[int, ...]]:
	traces = tuple(sorted((p.canonical() for p in paths), key=TracePath.sort_key))
	if symmetry:
		coloring, perm = _normalize(coloring, L)
	else:
		perm = _identity(L)
	return PartialSolution(coloring, traces), perm


def _free_end_last(p: TracePath, u: int) -> TracePath | None:
	"""Orient `p` so that `u` is its last vertex with nothing dangling beyond it."""
	if p.last == u and p.right_dangle == 0:
		return p
	if p.first == u and p.left_dangle == 0:
		return p.reversed()
	return None


###############################################################################
# Bag procedures
###############################################################################

def _leaf(v: int, L: int, symmetry: bool) -> Iterator[tuple[PartialSolution, None]]:
	colors = range(min(L, 1)) if symmetry else range(L)
	for c in colors:
		yield PartialSolution(((v, c),), (TracePath.single(v),)), None


def _attach(sol: PartialSolution, v: int, attach: list[int], k: int) -> list[TracePath] | None:
	"""Paths of `sol` after joining `v` to the same-colour bag vertices `attach`."""
	if not attach:
		return [*sol.traces, TracePath.single(v)]

	owner: dict[int, int] = {}
	for i, p in enumerate(sol.traces):
		for u in (p.first, p.last):
			if u in attach:
				owner[u] = i
	if len(owner) != len(attach):
		return None  # some neighbour is an interior bag vertex

	if len(attach) == 1:
		u = attach[0]
		p = _free_end_last(sol.traces[owner[u]], u)
		if p is None:
			return None
		merged = TracePath(p.bag_vertices + (v,), p.weights + (1,), p.left_dangle, 0)
		used = {owner[u]}
	else:
		u1, u2 = attach
		if owner[u1] == owner[u2]:
			return None  # both ends of one path: closing a cycle
		p1 = _free_end_last(sol.traces[owner[u1]], u1)
		p2 = _free_end_last(sol.traces[owner[u2]], u2)
		if p1 is None or p2 is None:
			return None
		p2 = p2.reversed()
		merged = TracePath(
			p1.bag_vertices + (v,) + p2.bag_vertices,
			p1.weights + (1, 1) + p2.weights,
			p1.left_dangle,
			p2.right_dangle,
		)
		used = {owner[u1], owner[u2]}

	if merged.total_length > k:
		return None
	return [p for i, p in enumerate(sol.traces) if i not in used] + [merged]


def _introduce(
	sols: Iterable[PartialSolution],
	v: int,
	g: Graph,
	k: int,
	L: int,
	symmetry: bool,
) -> Iterator[tuple[PartialSolution, tuple]]:
	for sol in sols:
		colors = dict(sol.coloring)
		by_color: dict[int, list[int]] = {}
		for u in g.adj[v]:
			c = colors.get(u)
			if c is not None:
				by_color.setdefault(c, []).append(u)

		if symmetry:
			candidates = range(min(len(set(colors.values())) + 1, L))
		else:
			candidates = range(L)
		for c in candidates:
			attach = by_color.get(c, [])
			if len(attach) > 2 or any(not g.is_fusable(u, v) for u in attach):
				continue
			paths = _attach(sol, v, attach, k)
			if paths is None:
				continue
			coloring = tuple(sorted(sol.coloring + ((v, c),)))
			new, perm = _build(coloring, paths, L, symmetry)
			yield new, (sol, perm)


def _forget(
	sols: Iterable[PartialSolution],
	v: int,
	L: int,
	symmetry: bool,
) -> Iterator[tuple[PartialSolution, tuple]]:
	for sol in sols:
		coloring = tuple(pair for pair in sol.coloring if pair[0] != v)
		paths = []
		for p in sol.traces:
			if v in p.bag_vertices:
				shrunk = shrink_vertex(p, v)
				if isinstance(shrunk, CompletedPath):
					continue
				paths.append(shrunk)
			else:
				paths.append(p)
		new, perm = _build(coloring, paths, L, symmetry)
		yield new, (sol, perm)


def _merge(s1: PartialSolution, s2: PartialSolution, k: int) -> list[TracePath] | None:
	"""
	Union of two children's traces over the same bag colouring.

	A weight-1 edge present in both children is the same G-edge and is kept
	once; any other pair of edges between the same two bag vertices is a
	cycle of length two.
	"""
	nbrs: dict[int, list[tuple[int, int]]] = {v: [] for v, _ in s1.coloring}
	dangles: dict[int, list[int]] = {v: [] for v, _ in s1.coloring}
	first_edges: dict[Edge, int] = {}

	for side, sol in enumerate((s1, s2)):
		for p in sol.traces:
			verts = p.bag_vertices
			for a, b, w in zip(verts, verts[1:], p.weights):
				key = edge_key(a, b)
				if side == 0:
					first_edges[key] = w
				elif key in first_edges:
					if w == 1 and first_edges[key] == 1:
						continue
					return None
				nbrs[a].append((b, w))
				nbrs[b].append((a, w))
			if p.left_dangle:
				dangles[p.first].append(p.left_dangle)
			if p.right_dangle:
				dangles[p.last].append(p.right_dangle)

	for v in nbrs:
		if len(nbrs[v]) + len(dangles[v]) > 2:
			return None

	paths = []
	visited: set[int] = set()
	for start in nbrs:
		if start in visited or len(nbrs[start]) > 1:
			continue
		verts = [start]
		weights = []
		visited.add(start)
		prev, cur = None, start
		while True:
			step = [(u, w) for u, w in nbrs[cur] if u != prev]
			if not step:
				break
			prev, (cur, w) = cur, step[0]
			verts.append(cur)
			weights.append(w)
			visited.add(cur)
		if len(verts) == 1:
			ends = dangles[start] + [0, 0]
			left, right = ends[0], ends[1]
		else:
			left = sum(dangles[start])
			right = sum(dangles[cur])
		path = TracePath(tuple(verts), tuple(weights), left, right)
		if path.total_length > k:
			return None
		paths.append(path)

	if len(visited) != len(nbrs):
		return None  # what is left has degree two everywhere: a cycle
	return paths


def _join(
	sols1: Iterable[PartialSolution],
	sols2: Iterable[PartialSolution],
	k: int,
	L: int,
) -> Iterator[tuple[PartialSolution, tuple]]:
	groups: dict[tuple, list[PartialSolution]] = {}
	for s2 in sols2:
		groups.setdefault(s2.coloring, []).append(s2)
	for s1 in sols1:
		for s2 in groups.get(s1.coloring, ()):
			paths = _merge(s1, s2, k)
			if paths is None:
				continue
			new, _ = _build(s1.coloring, paths, L, symmetry=False)
			yield new, (s1, s2)


def _check_bag(sols: Iterable[PartialSolution], expected: frozenset[int], what: str) -> list[PartialSolution]:
	sols = list(sols)
	for s in sols:
		if s.bag != expected:
			raise SolverError(f"{what}: solution over {sorted(s.bag)}, expected {sorted(expected)}")
	return sols


def process_leaf(v: int, L: int, *, symmetry: bool = False) -> set[PartialSolution]:
	"""Every colour of the single leaf vertex, each with the trivial trace ⟨v⟩."""
	return {s for s, _ in _leaf(v, L, symmetry)}


def process_introduce(
	sols: Iterable[PartialSolution],
	v: int,
	bag: frozenset[int],
	g: Graph,
	k: int,
	L: int,
	*,
	symmetry: bool = False,
) -> set[PartialSolution]:
	"""Extend every child solution by each admissible colour of `v`."""
	bag = frozenset(bag)
	if v not in bag:
		raise SolverError(f"introduced vertex {v} missing from bag {sorted(bag)}")
	child = _check_bag(sols, bag - {v}, "introduce")
	return {s for s, _ in _introduce(child, v, g, k, L, symmetry)}


def process_forget(
	sols: Iterable[PartialSolution],
	v: int,
	bag: frozenset[int],
	L: int,
	*,
	symmetry: bool = False,
) -> set[PartialSolution]:
	"""Drop `v` from the colouring and shrink it out of its trace."""
	bag = frozenset(bag)
	if v in bag:
		raise SolverError(f"forgotten vertex {v} still in bag {sorted(bag)}")
	child = _check_bag(sols, bag | {v}, "forget")
	return {s for s, _ in _forget(child, v, L, symmetry)}


def process_join(
	sols1: Iterable[PartialSolution],
	sols2: Iterable[PartialSolution],
	bag: frozenset[int],
	k: int,
) -> set[PartialSolution]:
	"""Combine compatible pairs of the two children's solutions."""
	bag = frozenset(bag)
	left = _check_bag(sols1, bag, "join")
	right = _check_bag(sols2, bag, "join")
	return {s for s, _ in _join(left, right, k, L=0)}


###############################################################################
# Running the dynamic program
###############################################################################

Table = dict[PartialSolution, tuple | None]


def _check_traces(table: Table, g: Graph, k: int, node: int) -> None:
	for sol in table:
		for p in sol.traces:
			try:
				p.check(g, k)
			except ValueError as e:
				raise SolverError(f"node {node}: {e}") from None


@dataclass
class DPStats:
	table_sizes: list[int] = field(default_factory=list)
	elapsed: float = 0.0

	@property
	def peak(self) -> int:
		return max(self.table_sizes, default=0)

	@property
	def total(self) -> int:
		return sum(self.table_sizes)


@dataclass
class DPRun:
	root_table: Table
	tables: dict[int, Table] | None   # every node's table when recording backpointers
	stats: DPStats


def run_tables(
	g: Graph,
	ntd: NiceTreeDecomposition,
	k: int,
	L: int,
	*,
	symmetry: bool = True,
	record: bool = False,
	deadline: float | None = None,
	check_traces: bool = False,
) -> DPRun:
	"""
	Evaluate every node of `ntd` in index order (children first).

	Each table maps a partial solution to the derivation it was first built
	from; without `record` child tables are dropped once consumed. An empty
	table anywhere means the root table is empty too, so evaluation stops.
	With `check_traces` every trace of every table is checked against G and k.
	"""
	started = time.perf_counter()
	stats = DPStats()
	tables: dict[int, Table] = {}
	root_table: Table = {}
	for i, node in enumerate(ntd.nodes):
		if deadline is not None and time.time() > deadline:
			raise SolverTimeout(f"time limit reached at node {i} of {len(ntd.nodes)}")

		if node.kind is NodeKind.LEAF:
			produced = _leaf(node.vertex, L, symmetry)
		elif node.kind is NodeKind.INTRODUCE:
			produced = _introduce(tables[node.children[0]], node.vertex, g, k, L, symmetry)
		elif node.kind is NodeKind.FORGET:
			produced = _forget(tables[node.children[0]], node.vertex, L, symmetry)
		else:
			left, right = node.children
			produced = _join(tables[left], tables[right], k, L)

		table: Table = {}
		for sol, derivation in produced:
			if sol not in table:
				table[sol] = derivation
		if not record:
			for c in node.children:
				del tables[c]
		tables[i] = table
		stats.table_sizes.append(len(table))
		if check_traces:
			_check_traces(table, g, k, i)
		if i == ntd.root:
			root_table = table
		if not table:
			break

	stats.elapsed = time.perf_counter() - started
	return DPRun(root_table, tables if record else None, stats)


def expand_solution(
	ntd: NiceTreeDecomposition,
	node: int,
	solution: PartialSolution,
	backpointers: dict[int, Table],
	L: int,
) -> dict[int, int]:
	"""
	Follow the recorded derivations below `node` and return the colour of
	every vertex of the subtree, in the label space of `solution`.
	"""
	assignment: dict[int, int] = {}
	stack = [(node, solution, _identity(L))]
	while stack:
		i, sol, sigma = stack.pop()
		current = ntd.nodes[i]
		try:
			derivation = backpointers[i][sol]
		except KeyError:
			raise SolverError(f"no derivation recorded for node {i}") from None

		if current.kind in (NodeKind.LEAF, NodeKind.INTRODUCE):
			v = current.vertex
			color = sigma[sol.color_of(v)]
			if assignment.setdefault(v, color) != color:
				raise SolverError(f"vertex {v} reconstructed with two colours")

		if current.kind is NodeKind.JOIN:
			s1, s2 = derivation
			stack.append((current.children[0], s1, sigma))
			stack.append((current.children[1], s2, sigma))
		elif current.kind is not NodeKind.LEAF:
			child, perm = derivation
			stack.append((current.children[0], child, tuple(sigma[perm[c]] for c in range(L))))
	return assignment


def reconstruct(
	ntd: NiceTreeDecomposition,
	root_solution: PartialSolution,
	backpointers: dict[int, Table] | None,
	L: int,
	n: int,
) -> Coloring:
	"""Certificate colouring of all n vertices from a root partial solution."""
	if backpointers is None:
		raise SolverError("backpointers were not recorded")
	assignment = expand_solution(ntd, ntd.root, root_solution, backpointers, L)
	missing = [v for v in range(n) if v not in assignment]
	if missing:
		raise SolverError(f"vertices never introduced: {missing[:5]}")
	return Coloring(tuple(assignment[v] for v in range(n)), L)


@dataclass
class Decision:
	colorable: bool
	coloring: Coloring | None
	stats: DPStats


def decide(
	g: Graph,
	ntd: NiceTreeDecomposition | None,
	k: int,
	L: int,
	*,
	symmetry: bool = True,
	certificate: bool = False,
	deadline: float | None = None,
	check: bool = True,
	check_traces: bool = False,
) -> Decision:
	"""
	Decide whether G admits a k-path L-colouring: true exactly when the root
	table is non-empty. With `certificate`, also rebuild one colouring.
	"""
	if g.n == 0:
		return Decision(True, Coloring((), max(L, 0)) if certificate else None, DPStats())
	if L < 1:
		return Decision(False, None, DPStats())
	if ntd is None:
		raise DecompositionError("a nice tree decomposition is required for a non-empty graph")
	if check:
		report = validate_nice(g, ntd)
		if not report:
			raise DecompositionError(f"invalid nice tree decomposition: {report}")

	run = run_tables(
		g, ntd, k, L,
		symmetry=symmetry,
		record=certificate,
		deadline=deadline,
		check_traces=check_traces,
	)
	if not run.root_table:
		return Decision(False, None, run.stats)
	coloring = None
	if certificate:
		root_solution = min(run.root_table, key=PartialSolution.sort_key)
		coloring = reconstruct(ntd, root_solution, run.tables, L, g.n)
	return Decision(True, coloring, run.stats)


###############################################################################
# Preprocessing split
###############################################################################

@dataclass(frozen=True)
class SplitPart:
	graph: Graph
	vertices: tuple[int, ...]   # local id -> original id
	component: int


@dataclass(frozen=True)
class SplitPlan:
	"""
	Independent parts of G: its connected components, optionally cut further
	along non-fusable bridges. `cut_edges` are the removed bridges in
	original ids.
	"""

	n: int
	parts: tuple[SplitPart, ...]
	cut_edges: tuple[Edge, ...]
	num_components: int

	def component_chromatic(self, part_chromatic: Sequence[int]) -> list[int]:
		chi = [0] * self.num_components
		for part, value in zip(self.parts, part_chromatic):
			chi[part.component] = max(chi[part.component], value)
		comp_of = self.component_of_vertex()
		for u, _ in self.cut_edges:
			# u and v sit on a non-fusable edge, so they can never share a colour
			c = comp_of[u]
			chi[c] = max(chi[c], 2)
		return chi

	def chromatic(self, part_chromatic: Sequence[int]) -> int:
		return max(self.component_chromatic(part_chromatic), default=0)

	def component_of_vertex(self) -> dict[int, int]:
		return {v: part.component for part in self.parts for v in part.vertices}

	def recombine(self, part_colorings: Sequence[Sequence[int]], part_chromatic: Sequence[int]) -> Coloring:
		"""
		Merge per-part colourings into one colouring of G. Parts hanging off a
		cut edge (u, v) get two colours swapped when needed so that u and v
		differ; each part is reached through exactly one cut edge because the
		cut edges are bridges.
		"""
		palette = self.chromatic(part_chromatic)
		part_of: dict[int, int] = {}
		colors: dict[int, int] = {}
		for p, (part, local) in enumerate(zip(self.parts, part_colorings)):
			for i, v in enumerate(part.vertices):
				part_of[v] = p
				colors[v] = local[i]

		links: dict[int, list[tuple[int, int]]] = {}
		for u, v in self.cut_edges:
			links.setdefault(part_of[u], []).append((u, v))
			links.setdefault(part_of[v], []).append((v, u))

		placed: set[int] = set()
		for start in range(len(self.parts)):
			if start in placed:
				continue
			placed.add(start)
			queue = [start]
			while queue:
				p = queue.pop(0)
				for inside, outside in links.get(p, ()):
					q = part_of[outside]
					if q in placed:
						continue
					placed.add(q)
					queue.append(q)
					clash = colors[inside]
					if colors[outside] == clash:
						other = 1 if clash == 0 else 0
						for w in self.parts[q].vertices:
							if colors[w] == clash:
								colors[w] = other
							elif colors[w] == other:
								colors[w] = clash
		return Coloring(tuple(colors[v] for v in range(self.n)), palette)


def preprocess_split(g: Graph, cut_edges: bool = True) -> SplitPlan:
	"""
	Split G into connected components and, when `cut_edges` is set, split
	each component further along its non-fusable bridges.
	"""
	parts = []
	removed: list[Edge] = []
	components = connected_components(g)
	for ci, (comp, to_local) in enumerate(components):
		original = sorted(to_local, key=to_local.get)
		bridges = find_ef_cut_edges(comp) if cut_edges else []
		if not bridges:
			parts.append(SplitPart(comp, tuple(original), ci))
			continue
		cut = frozenset(bridges)
		trimmed = Graph(comp.n, comp.edges - cut, comp.f_edges)
		for piece, piece_local in connected_components(trimmed):
			inner = sorted(piece_local, key=piece_local.get)
			parts.append(SplitPart(piece, tuple(original[x] for x in inner), ci))
		removed.extend(edge_key(original[a], original[b]) for a, b in bridges)
	return SplitPlan(g.n, tuple(parts), tuple(sorted(removed)), len(components))


###############################################################################
# Chromatic number search
###############################################################################

@dataclass(frozen=True)
class SolverOptions:
	strategy: Strategy = Strategy.BEST_OF_BOTH
	symmetry: bool = True
	split: bool = True
	certificate: bool = False
	jobs: int = 1
	time_limit: float | None = None   # seconds
	check_traces: bool = False


@dataclass(frozen=True)
class PartResult:
	chromatic: int
	width: int
	coloring: tuple[int, ...] | None
	nice_nodes: int
	peak_table: int
	total_states: int
	decompose_time: float
	nicify_time: float
	decide_times: tuple[tuple[int, float], ...]   # (L, seconds)
	table_sizes: tuple[int, ...] = ()   # per nice node, for the successful L


def solve_part(g: Graph, k: int, opts: SolverOptions, deadline: float | None = None) -> PartResult:
	"""
	χ of one connected part: decompose, nicify, then try L = 1, 2, ... up to
	width + 1, which must succeed.
	"""
	t0 = time.perf_counter()
	td = heuristic_decompose(g, opts.strategy)
	t1 = time.perf_counter()
	ntd = make_nice(td, g)
	t2 = time.perf_counter()
	w = ntd.width()

	peak = total = 0
	decide_times = []
	for L in range(1, w + 2):
		t = time.perf_counter()
		decision = decide(
			g, ntd, k, L,
			symmetry=opts.symmetry,
			certificate=opts.certificate,
			deadline=deadline,
			check=False,
			check_traces=opts.check_traces,
		)
		decide_times.append((L, time.perf_counter() - t))
		peak = max(peak, decision.stats.peak)
		total += decision.stats.total
		if decision.colorable:
			return PartResult(
				chromatic=L,
				width=w,
				coloring=decision.coloring.assignment if decision.coloring else None,
				nice_nodes=len(ntd.nodes),
				peak_table=peak,
				total_states=total,
				decompose_time=t1 - t0,
				nicify_time=t2 - t1,
				decide_times=tuple(decide_times),
				table_sizes=tuple(decision.stats.table_sizes),
			)
	raise SolverError(f"no {k}-path colouring with {w + 1} colours on a width-{w} decomposition")


@dataclass
class SolveStats:
	parts: int = 0
	components: int = 0
	cut_edges: int = 0
	width: int = -1
	nice_nodes: int = 0
	peak_table: int = 0
	total_states: int = 0
	decompose_time: float = 0.0
	nicify_time: float = 0.0
	decide_time: float = 0.0
	elapsed: float = 0.0
	part_chromatic: list[int] = field(default_factory=list)
	table_sizes: list[list[int]] = field(default_factory=list)   # per part, in nice-node order


@dataclass
class SolveResult:
	colorable: bool
	coloring: Coloring | None
	chromatic: int | None
	stats: SolveStats


def _solve_parts(parts: Sequence[SplitPart], k: int, opts: SolverOptions, deadline: float | None) -> list[PartResult]:
	graphs = [p.graph for p in parts]
	if opts.jobs > 1 and len(graphs) > 1:
		with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
			return list(pool.map(solve_part, graphs, repeat(k), repeat(opts), repeat(deadline)))
	return [solve_part(h, k, opts, deadline) for h in graphs]


def decide_graph(g: Graph, k: int, L: int, opts: SolverOptions | None = None) -> Decision:
	"""
	Decide k-path L-colourability of a whole graph, part by part. A cut
	non-fusable bridge needs L >= 2 on its own.
	"""
	opts = opts or SolverOptions()
	deadline = time.time() + opts.time_limit if opts.time_limit else None
	plan = preprocess_split(g, cut_edges=opts.split)
	stats = DPStats()
	if plan.cut_edges and L < 2:
		return Decision(False, None, stats)

	colorings = []
	for part in plan.parts:
		ntd = make_nice(heuristic_decompose(part.graph, opts.strategy), part.graph)
		decision = decide(
			part.graph, ntd, k, L,
			symmetry=opts.symmetry,
			certificate=opts.certificate,
			deadline=deadline,
			check=False,
			check_traces=opts.check_traces,
		)
		stats.table_sizes.extend(decision.stats.table_sizes)
		stats.elapsed += decision.stats.elapsed
		if not decision.colorable:
			return Decision(False, None, stats)
		colorings.append(decision.coloring.assignment if decision.coloring else None)

	coloring = None
	if opts.certificate:
		merged = plan.recombine(colorings, [L] * len(plan.parts))
		coloring = Coloring(merged.assignment, max(L, merged.num_colors))
		verdict = verify_coloring(g, coloring, k)
		if not verdict.valid:
			raise SolverError(f"certificate rejected by the verifier: {verdict.first_violation()}")
	return Decision(True, coloring, stats)


def chromatic_number(g: Graph, k: int, opts: SolverOptions | None = None) -> SolveResult:
	"""
	k-path chromatic number of G: the maximum over independent parts, with
	the bridge corner case (two colours across a non-fusable bridge) handled
	by the split plan.
	"""
	opts = opts or SolverOptions()
	started = time.perf_counter()
	deadline = time.time() + opts.time_limit if opts.time_limit else None

	plan = preprocess_split(g, cut_edges=opts.split)
	results = _solve_parts(plan.parts, k, opts, deadline)
	part_chi = [r.chromatic for r in results]
	chi = plan.chromatic(part_chi)

	# width of a component = widest part, and at least 1 when a bridge was cut
	comp_width = [-1] * plan.num_components
	for part, r in zip(plan.parts, results):
		comp_width[part.component] = max(comp_width[part.component], r.width)
	comp_of = plan.component_of_vertex()
	for u, _ in plan.cut_edges:
		comp_width[comp_of[u]] = max(comp_width[comp_of[u]], 1)
	for c, value in enumerate(plan.component_chromatic(part_chi)):
		if value > comp_width[c] + 1:
			raise SolverError(f"component {c}: χ={value} exceeds width {comp_width[c]} + 1")

	coloring = None
	if opts.certificate:
		coloring = plan.recombine([r.coloring for r in results], part_chi)
		verdict = verify_coloring(g, coloring, k)
		if not verdict.valid:
			raise SolverError(f"certificate rejected by the verifier: {verdict.first_violation()}")

	stats = SolveStats(
		parts=len(plan.parts),
		components=plan.num_components,
		cut_edges=len(plan.cut_edges),
		width=max(comp_width, default=-1),
		nice_nodes=sum(r.nice_nodes for r in results),
		peak_table=max((r.peak_table for r in results), default=0),
		total_states=sum(r.total_states for r in results),
		decompose_time=sum(r.decompose_time for r in results),
		nicify_time=sum(r.nicify_time for r in results),
		decide_time=sum(t for r in results for _, t in r.decide_times),
		elapsed=time.perf_counter() - started,
		part_chromatic=part_chi,
		table_sizes=[list(r.table_sizes) for r in results],
	)
	return SolveResult(colorable=True, coloring=coloring, chromatic=chi, stats=stats)
