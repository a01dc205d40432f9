from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path

import networkx as nx
import numpy as np

from errors import (
	ColoringError,
	DuplicateEdgeError,
	EdgeCountError,
	GeneratorError,
	MalformedHeaderError,
	MalformedLineError,
	SelfLoopError,
	SolverError,
	VertexRangeError,
)
from graph_core import Graph, connected_components
from oracle import Coloring
from tree_decomp import Strategy, heuristic_decompose


Point = tuple[int, int]


###############################################################################
# Instance format
###############################################################################

def _ints(fields: list[str], line_no: int, what: str) -> list[int]:
	try:
		return [int(x) for x in fields]
	except ValueError:
		raise MalformedLineError(f"non-integer field in {what}", line_no) from None


def parse_instance(text: str) -> tuple[Graph, int]:
	"""
	Read `p kpath <n> <m> <k>` followed by m lines `e <u> <v> <f>`.

	Blank lines and `c` comment lines are skipped anywhere. Vertices are
	0-based, u < v, and f is 1 for a fusable edge.
	"""
	header: tuple[int, int, int] | None = None
	flagged: list[tuple[int, int, bool]] = []
	seen: set[tuple[int, int]] = set()

	for line_no, raw in enumerate(text.splitlines(), start=1):
		fields = raw.split()
		if not fields or fields[0] == "c":
			continue

		if header is None:
			if fields[:2] != ["p", "kpath"] or len(fields) != 5:
				raise MalformedHeaderError("expected 'p kpath <n> <m> <k>'", line_no)
			try:
				n, m, k = (int(x) for x in fields[2:])
			except ValueError:
				raise MalformedHeaderError("non-integer header field", line_no) from None
			if min(n, m, k) < 0:
				raise MalformedHeaderError("header values must be nonnegative", line_no)
			header = (n, m, k)
			continue

		if fields[0] == "p":
			raise MalformedHeaderError("second header line", line_no)
		if fields[0] != "e" or len(fields) != 4:
			raise MalformedLineError(f"expected 'e <u> <v> <f>', got {raw.strip()!r}", line_no)
		u, v, f = _ints(fields[1:], line_no, "edge line")
		if u == v:
			raise SelfLoopError(f"self-loop on vertex {u}", line_no)
		n = header[0]
		if not (0 <= u < n and 0 <= v < n):
			raise VertexRangeError(f"edge ({u}, {v}) outside 0..{n - 1}", line_no)
		if u > v:
			raise MalformedLineError(f"edge ({u}, {v}) must be written with u < v", line_no)
		if f not in (0, 1):
			raise MalformedLineError(f"fusable flag must be 0 or 1, got {f}", line_no)
		if (u, v) in seen:
			raise DuplicateEdgeError(f"duplicate edge ({u}, {v})", line_no)
		seen.add((u, v))
		flagged.append((u, v, f == 1))

	if header is None:
		raise MalformedHeaderError("missing 'p kpath' header")
	n, m, k = header
	if len(flagged) != m:
		raise EdgeCountError(f"header announces {m} edges, found {len(flagged)}")
	return Graph.from_flagged(n, flagged), k


def serialize_instance(g: Graph, k: int) -> str:
	"""Canonical text: header, then edges sorted by (u, v)."""
	lines = [f"p kpath {g.n} {g.m} {k}"]
	for u, v in g.sorted_edges():
		lines.append(f"e {u} {v} {1 if (u, v) in g.f_edges else 0}")
	return "\n".join(lines) + "\n"


def read_instance(path: str | Path) -> tuple[Graph, int]:
	return parse_instance(Path(path).read_text(encoding="ascii"))


def write_instance(path: str | Path, g: Graph, k: int) -> None:
	p = Path(path)
	p.parent.mkdir(parents=True, exist_ok=True)
	p.write_text(serialize_instance(g, k), encoding="ascii", newline="\n")


###############################################################################
# Layout sidecar and colouring files
###############################################################################

def layout_path(instance_path: str | Path) -> Path:
	"""`foo.kpath` -> `foo.layout`."""
	return Path(instance_path).with_suffix(".layout")


def serialize_layout(points: list[Point]) -> str:
	return "".join(f"{x} {y}\n" for x, y in points)


def parse_layout(text: str) -> list[Point]:
	points = []
	for line_no, raw in enumerate(text.splitlines(), start=1):
		fields = raw.split()
		if not fields:
			continue
		if len(fields) != 2:
			raise MalformedLineError("expected '<x> <y>'", line_no)
		x, y = _ints(fields, line_no, "layout line")
		points.append((x, y))
	return points


def write_layout(path: str | Path, points: list[Point]) -> None:
	Path(path).write_text(serialize_layout(points), encoding="ascii", newline="\n")


def read_layout(path: str | Path) -> list[Point]:
	return parse_layout(Path(path).read_text(encoding="ascii"))


def serialize_coloring(coloring: Coloring) -> str:
	return "".join(f"{v} {c}\n" for v, c in enumerate(coloring.assignment))


def parse_coloring(text: str, n: int) -> Coloring:
	"""
	One `<vertex> <color>` pair per line. Every vertex 0..n-1 must appear
	exactly once; the palette is taken as 0..max colour.
	"""
	mapping: dict[int, int] = {}
	for line_no, raw in enumerate(text.splitlines(), start=1):
		fields = raw.split()
		if not fields or fields[0] == "c":
			continue
		try:
			v, c = (int(x) for x in fields)
		except ValueError:
			raise ColoringError(f"line {line_no}: expected '<vertex> <color>'") from None
		if c < 0:
			raise ColoringError(f"line {line_no}: negative colour {c}")
		if v in mapping:
			raise ColoringError(f"line {line_no}: vertex {v} coloured twice")
		mapping[v] = c
	return Coloring.from_mapping(n, mapping)


def write_coloring(path: str | Path, coloring: Coloring) -> None:
	Path(path).write_text(serialize_coloring(coloring), encoding="ascii", newline="\n")


def read_coloring(path: str | Path, n: int) -> Coloring:
	return parse_coloring(Path(path).read_text(encoding="ascii"), n)


###############################################################################
# Generators
###############################################################################

@dataclass(frozen=True)
class GenParams:
	"""
	Parameters of the via-layout generator, in abstract integer length units.

	Points keep at least `pitch` apart. A pair closer than `d_lith` is a
	conflict edge; a conflict whose distance is at least `d_dsa_min` is also
	fusable. A zero region size is derived from `n` and `fill`, the fraction
	of the region covered by disks of diameter `pitch`.
	"""

	n: int = 1000
	seed: int = 0
	pitch: int = 100
	d_lith: int = 135
	d_dsa_min: int = 103
	width: int = 0
	height: int = 0
	fill: float = 0.42
	max_attempts: int = 0         # 0 means 200 draws per requested point

	def validate(self) -> None:
		if self.n < 0:
			raise GeneratorError(f"vertex count must be nonnegative, got {self.n}")
		if self.pitch <= 0:
			raise GeneratorError(f"pitch must be positive, got {self.pitch}")
		if not 0 <= self.d_dsa_min <= self.d_lith:
			raise GeneratorError(f"need 0 <= d_dsa_min <= d_lith, got {self.d_dsa_min} and {self.d_lith}")
		if not 0 < self.fill < 1:
			raise GeneratorError(f"fill must lie strictly between 0 and 1, got {self.fill}")
		if self.width < 0 or self.height < 0:
			raise GeneratorError("region size must be nonnegative")

	def region(self) -> tuple[int, int]:
		if self.width and self.height:
			return self.width, self.height
		area = self.n * math.pi * (self.pitch / 2) ** 2 / self.fill
		side = max(math.ceil(math.sqrt(area)), self.pitch)
		return self.width or side, self.height or side


@dataclass(frozen=True)
class GeneratedInstance:
	graph: Graph
	points: list[Point] = field(repr=False)


def _cell(p: Point, size: int) -> tuple[int, int]:
	return p[0] // size, p[1] // size


def _near(grid: dict[tuple[int, int], list[int]], cell: tuple[int, int]):
	cx, cy = cell
	for dx in (-1, 0, 1):
		for dy in (-1, 0, 1):
			yield from grid.get((cx + dx, cy + dy), ())


def _dist2(a: Point, b: Point) -> int:
	return (a[0] - b[0]) ** 2 + (a[1] - b[1]) ** 2


def conflict_graph(points: list[Point], d_lith: int, d_dsa_min: int) -> Graph:
	"""Edges for squared distance <= d_lith², fusable when also >= d_dsa_min²."""
	lith2 = d_lith * d_lith
	dsa2 = d_dsa_min * d_dsa_min
	size = max(d_lith, 1)
	grid: dict[tuple[int, int], list[int]] = {}
	for i, p in enumerate(points):
		grid.setdefault(_cell(p, size), []).append(i)

	edges = []
	fusable = []
	for i, p in enumerate(points):
		for j in _near(grid, _cell(p, size)):
			if j <= i:
				continue
			d2 = _dist2(p, points[j])
			if d2 <= lith2:
				edges.append((i, j))
				if d2 >= dsa2:
					fusable.append((i, j))
	return Graph.from_edges(len(points), edges, fusable)


def generate(params: GenParams) -> GeneratedInstance:
	"""
	Place `n` integer points by rejection sampling and build their conflict
	graph. The same parameters always give the same instance.
	"""
	params.validate()
	width, height = params.region()
	budget = params.max_attempts or 200 * max(params.n, 1)
	rng = np.random.default_rng(params.seed)
	pitch2 = params.pitch * params.pitch

	points: list[Point] = []
	grid: dict[tuple[int, int], list[int]] = {}
	attempts = 0
	while len(points) < params.n:
		if attempts >= budget:
			raise GeneratorError(
				f"placed only {len(points)} of {params.n} points in a "
				f"{width}x{height} region after {budget} draws"
			)
		attempts += 1
		p = (int(rng.integers(0, width)), int(rng.integers(0, height)))
		cell = _cell(p, params.pitch)
		if any(_dist2(p, points[j]) < pitch2 for j in _near(grid, cell)):
			continue
		grid.setdefault(cell, []).append(len(points))
		points.append(p)

	return GeneratedInstance(conflict_graph(points, params.d_lith, params.d_dsa_min), points)


def generate_strip(n: int, seed: int = 0, non_f_ratio: float = 0.0, pitch: int = 100) -> GeneratedInstance:
	"""
	Triangle strip on n vertices: edges (i, i+1) and (i, i+2), width 2.

	Each long edge (i, i+2) is independently made non-fusable with
	probability `non_f_ratio`. The layout zig-zags along two rows.
	"""
	if n < 0:
		raise GeneratorError(f"vertex count must be nonnegative, got {n}")
	if not 0.0 <= non_f_ratio <= 1.0:
		raise GeneratorError(f"non_f_ratio must lie in [0, 1], got {non_f_ratio}")
	rng = np.random.default_rng(seed)
	edges = []
	fusable = []
	for i in range(n - 1):
		edges.append((i, i + 1))
		fusable.append((i, i + 1))
		if i + 2 < n:
			edges.append((i, i + 2))
			if rng.random() >= non_f_ratio:
				fusable.append((i, i + 2))
	points = [(i * pitch // 2, (i % 2) * pitch) for i in range(n)]
	return GeneratedInstance(Graph.from_edges(n, edges, fusable), points)


###############################################################################
# Statistics
###############################################################################

EXACT_CLIQUE_LIMIT = 200


@dataclass(frozen=True)
class ComponentStats:
	n: int
	m: int
	omega: int
	omega_approx: bool
	width: int


@dataclass(frozen=True)
class InstanceStats:
	n: int
	m: int
	f_count: int
	omega: int
	omega_approx: bool
	max_degree: int
	width: int
	components: int
	max_component: int
	per_component: tuple[ComponentStats, ...] = ()

	def as_dict(self) -> dict:
		return {
			"n": self.n,
			"m": self.m,
			"f": self.f_count,
			"omega": self.omega,
			"omega_approx": self.omega_approx,
			"delta": self.max_degree,
			"width": self.width,
			"components": self.components,
			"max_component": self.max_component,
		}


def clique_number(g: Graph) -> tuple[int, bool]:
	"""ω(G) and whether it is only a lower bound."""
	if g.n == 0:
		return 0, False
	h = g.to_networkx()
	if g.n <= EXACT_CLIQUE_LIMIT:
		clique, _ = nx.max_weight_clique(h, weight=None)
		return len(clique), False
	return len(nx.approximation.max_clique(h)), True


def stats(g: Graph, strategy: Strategy = Strategy.BEST_OF_BOTH) -> InstanceStats:
	"""Size, ω, Δ and heuristic width of G, overall and per component."""
	per = []
	for comp, _ in connected_components(g):
		omega, approx = clique_number(comp)
		w = heuristic_decompose(comp, strategy).width()
		if omega - 1 > w:
			raise SolverError(f"clique of size {omega} in a width-{w} decomposition")
		per.append(ComponentStats(comp.n, comp.m, omega, approx, w))

	return InstanceStats(
		n=g.n,
		m=g.m,
		f_count=len(g.f_edges),
		omega=max((c.omega for c in per), default=0),
		omega_approx=any(c.omega_approx for c in per),
		max_degree=g.max_degree(),
		width=max((c.width for c in per), default=-1),
		components=len(per),
		max_component=max((c.n for c in per), default=0),
		per_component=tuple(per),
	)
