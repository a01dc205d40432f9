#!/usr/bin/env python3
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
import time
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np
from humanfriendly import format_timespan
from humanfriendly.tables import format_pretty_table

from config import GlobalConfig, load_config_or_default, _parse_optional_duration, _parse_strategy
from dp_solver import SolverOptions, chromatic_number, decide_graph
from errors import (
	EXIT_INPUT,
	EXIT_INTERNAL,
	EXIT_INTERRUPTED,
	EXIT_NEGATIVE,
	EXIT_OK,
	EXIT_TIMEOUT,
	InputError,
	SolverError,
	SolverTimeout,
)
from instances_io import (
	GenParams,
	InstanceStats,
	generate,
	generate_strip,
	layout_path,
	read_coloring,
	read_instance,
	serialize_coloring,
	serialize_instance,
	serialize_layout,
	stats,
	write_coloring,
	write_instance,
	write_layout,
)
from oracle import brute_force_chromatic, verify_coloring
from runlog import JsonlRunLog


JSON_SCHEMA_VERSION = 1
INSTANCE_SUFFIX = ".kpath"


###############################################################################
# Output
###############################################################################

class Console:
	"""
	Progress printer. Tagged lines go to stderr whenever stdout carries
	machine output (JSON or CSV).
	"""

	def __init__(self, machine: bool = False, progress: bool = True):
		self.machine = machine
		self.progress = progress

	@property
	def stream(self):
		return sys.stderr if self.machine else sys.stdout

	def log(self, message: str) -> None:
		print(message, file=self.stream)

	def info(self, message: str) -> None:
		if self.progress:
			self.log(message)


###############################################################################
# Arguments
###############################################################################

def _add_solver_flags(p: argparse.ArgumentParser) -> None:
	p.add_argument(
		"--strategy",
		default=None,
		help="Decomposition heuristic: min_degree, min_fill or best_of_both",
	)
	p.add_argument(
		"--no-split",
		action="store_true",
		help="Do not cut along non-fusable bridges",
	)
	p.add_argument(
		"--jobs",
		type=int,
		default=None,
		help="Worker processes",
	)
	p.add_argument(
		"--time-limit",
		default=None,
		help="Stop after this long, e.g. '90 seconds' or '10 minutes'",
	)


def parse_args(argv: list[str] | None = None) -> argparse.Namespace:
	"""
	Build and parse the CLI.

	Returns:
		argparse.Namespace with `command` naming the subcommand and the
		subcommand's own flags.
	"""
	p = argparse.ArgumentParser(
		description="k-path colouring solver over tree decompositions"
	)
	p.add_argument(
		"--config",
		default=None,
		help="Path to config file (default: config.yaml when present)",
	)
	sub = p.add_subparsers(dest="command", required=True)

	s = sub.add_parser("solve", help="Compute the k-path chromatic number")
	s.add_argument("instance", type=Path)
	s.add_argument("--k", type=int, nargs="+", default=None, help="Path length bound(s); default from the file")
	s.add_argument("--certificate", action="store_true", help="Rebuild and verify a colouring")
	s.add_argument("--coloring-out", type=Path, default=None, help="Write the certificate colouring here")
	s.add_argument("--json", action="store_true", help="Print a JSON report")
	s.add_argument("--dry-run", action="store_true", help="Do not write the run log")
	s.add_argument("--cross-check", action="store_true", help="Confirm χ with the brute-force oracle on small graphs")
	_add_solver_flags(s)

	d = sub.add_parser("decide", help="Exit 0 when a k-path L-colouring exists, 1 otherwise")
	d.add_argument("instance", type=Path)
	d.add_argument("--k", type=int, default=None)
	d.add_argument("--colors", "-L", type=int, required=True)
	d.add_argument("--certificate", action="store_true")
	d.add_argument("--coloring-out", type=Path, default=None)
	_add_solver_flags(d)

	v = sub.add_parser("verify", help="Check a colouring file against an instance")
	v.add_argument("instance", type=Path)
	v.add_argument("coloring", type=Path)
	v.add_argument("--k", type=int, default=None)

	g = sub.add_parser("gen", help="Generate an instance")
	g.add_argument("--n", type=int, default=None)
	g.add_argument("--seed", type=int, default=0)
	g.add_argument("--dlith", type=int, default=None)
	g.add_argument("--ddsa", type=int, default=None, help="Lower end of the fusable window")
	g.add_argument("--pitch", type=int, default=None)
	g.add_argument("--fill", type=float, default=None)
	g.add_argument("--strip", action="store_true", help="Triangle strip instead of a via layout")
	g.add_argument("--non-f-ratio", type=float, default=None)
	g.add_argument("--k", type=int, default=1, help="k written to the header")
	g.add_argument("--out", type=Path, default=None, help="Instance path; layout goes next to it")
	g.add_argument("--dry-run", action="store_true")

	t = sub.add_parser("stats", help="Print instance statistics")
	t.add_argument("instance", type=Path)
	t.add_argument("--json", action="store_true")
	t.add_argument("--strategy", default=None)

	b = sub.add_parser("bench", help="Solve every instance of a directory and print CSV")
	b.add_argument("suite", type=Path)
	b.add_argument("--k", type=int, nargs="+", default=None)
	b.add_argument("--repeat", type=int, default=None)
	b.add_argument("--out", type=Path, default=None, help="CSV path (default: stdout)")
	b.add_argument("--dry-run", action="store_true")
	_add_solver_flags(b)

	return p.parse_args(argv)


def apply_overrides(config: GlobalConfig, args: argparse.Namespace, console: Console) -> None:
	"""
	Override config using CLI flags
	"""
	if getattr(args, "strategy", None) is not None:
		console.log(f"[CLI] override strategy: {args.strategy}")
		config.solver.strategy = _parse_strategy(args.strategy)

	if getattr(args, "no_split", False):
		console.log("[CLI] override split: FALSE")
		config.solver.split = False

	if getattr(args, "certificate", False):
		config.solver.certificate = True

	if getattr(args, "jobs", None) is not None:
		if args.jobs < 1:
			raise InputError("--jobs must be at least 1")
		console.log(f"[CLI] override jobs: {args.jobs}")
		config.solver.jobs = args.jobs

	if getattr(args, "time_limit", None) is not None:
		console.log(f"[CLI] override time limit: {args.time_limit}")
		config.solver.time_limit = _parse_optional_duration(args.time_limit)

	if getattr(args, "repeat", None) is not None:
		if args.repeat < 1:
			raise InputError("--repeat must be at least 1")
		console.log(f"[CLI] override repeat: {args.repeat}")
		config.bench.repeat = args.repeat

	if getattr(args, "dry_run", False):
		config.runtime.dry_run = True


def solver_options(config: GlobalConfig) -> SolverOptions:
	s = config.solver
	return SolverOptions(
		strategy=s.strategy,
		symmetry=s.symmetry,
		split=s.split,
		certificate=s.certificate,
		jobs=s.jobs,
		time_limit=s.time_limit,
		check_traces=s.check_traces,
	)


###############################################################################
# Reports
###############################################################################

@dataclass
class KResult:
	k: int
	chromatic: int
	width: int
	parts: int
	peak_table: int
	total_states: int
	times: dict[str, float]
	table_sizes: list[list[int]] = field(default_factory=list)
	verified: bool | None = None
	coloring: list[int] | None = None

	def as_dict(self) -> dict:
		out = {
			"k": self.k,
			"chromatic": self.chromatic,
			"width": self.width,
			"parts": self.parts,
			"peak_table": self.peak_table,
			"total_states": self.total_states,
			"table_sizes": self.table_sizes,
			"times": self.times,
		}
		if self.verified is not None:
			out["verified"] = self.verified
			out["coloring"] = self.coloring
		return out


@dataclass
class RunReport:
	instance: str
	stats: InstanceStats
	results: list[KResult] = field(default_factory=list)

	def as_dict(self) -> dict:
		return {
			"schema": JSON_SCHEMA_VERSION,
			"instance": self.instance,
			"stats": self.stats.as_dict(),
			"results": [r.as_dict() for r in self.results],
		}


def solve_one(g, k: int, opts: SolverOptions) -> tuple[KResult, object]:
	result = chromatic_number(g, k, opts)
	st = result.stats
	k_result = KResult(
		k=k,
		chromatic=result.chromatic,
		width=st.width,
		parts=st.parts,
		peak_table=st.peak_table,
		total_states=st.total_states,
		table_sizes=st.table_sizes,
		times={
			"decompose": st.decompose_time,
			"nicify": st.nicify_time,
			"decide": st.decide_time,
			"total": st.elapsed,
		},
	)
	if opts.certificate:
		# chromatic_number raises SolverError when the verifier rejects
		k_result.verified = True
		k_result.coloring = list(result.coloring.assignment)
	return k_result, result.coloring


def cross_check(g, k: int, chromatic: int, cap: int, console: Console) -> bool:
	"""Compare against brute force; False when the graph is above the cap."""
	if g.n > cap:
		console.log(f"[WARN] cross-check skipped: {g.n} vertices, oracle cap is {cap}")
		return False
	expected = brute_force_chromatic(g, k, cap)
	if expected != chromatic:
		raise SolverError(f"χ^{k} = {chromatic} but brute force gives {expected}")
	console.info(f"[OK] brute force agrees: χ^{k} = {expected}")
	return True


def warn_if_changed(console: Console, name: str, previous: dict | None, results: list[KResult]) -> int:
	"""Warn for every k whose χ differs from the last logged run of `name`."""
	if previous is None:
		return 0
	before = {r.get("k"): r.get("chromatic") for r in previous.get("results", []) if isinstance(r, dict)}
	changed = 0
	for r in results:
		old = before.get(r.k)
		if old is not None and old != r.chromatic:
			console.log(f"[WARN] [{name}] χ^{r.k} = {r.chromatic}, the last logged run had {old}")
			changed += 1
	return changed


def _print_stats_table(console: Console, name: str, st: InstanceStats) -> None:
	omega = f"{st.omega}{'+' if st.omega_approx else ''}"
	row = [name, st.n, st.m, st.f_count, omega, st.max_degree, st.width, st.components]
	print(format_pretty_table([row], ["instance", "n", "m", "|F|", "ω", "Δ", "width", "components"]), file=console.stream)


###############################################################################
# Commands
###############################################################################

def cmd_solve(args: argparse.Namespace, config: GlobalConfig, console: Console) -> int:
	g, file_k = read_instance(args.instance)
	ks = args.k if args.k is not None else [file_k]
	if args.coloring_out is not None and len(ks) != 1:
		raise InputError("--coloring-out needs exactly one --k")
	opts = solver_options(config)
	name = args.instance.stem

	report = RunReport(name, stats(g, opts.strategy))
	coloring = None
	for k in ks:
		console.info(f"[{name}] solving k={k} (n={g.n}, m={g.m})")
		k_result, coloring = solve_one(g, k, opts)
		if args.cross_check:
			cross_check(g, k, k_result.chromatic, config.oracle.max_vertices, console)
		report.results.append(k_result)
		console.info(f"[OK] [{name}] χ^{k} = {k_result.chromatic} in {format_timespan(k_result.times['total'])}")

	if args.coloring_out is not None and coloring is not None and not config.runtime.dry_run:
		write_coloring(args.coloring_out, coloring)
		console.info(f"[OK] coloring written to {args.coloring_out}")

	if config.logging.run_log is not None:
		log = JsonlRunLog(config.logging.run_log, dry_run=config.runtime.dry_run)
		warn_if_changed(console, name, log.latest(name), report.results)
		log.append(report.as_dict())

	if args.json:
		print(json.dumps(report.as_dict(), ensure_ascii=False))
		return EXIT_OK

	_print_stats_table(console, name, report.stats)
	rows = [
		[r.k, r.chromatic, r.width, r.peak_table, format_timespan(r.times["total"]),
		 "yes" if r.verified else "-"]
		for r in report.results
	]
	print(format_pretty_table(rows, ["k", "χ", "width", "peak table", "time", "verified"]))
	if coloring is not None and args.coloring_out is None:
		sys.stdout.write(serialize_coloring(coloring))
	return EXIT_OK


def cmd_decide(args: argparse.Namespace, config: GlobalConfig, console: Console) -> int:
	g, file_k = read_instance(args.instance)
	k = args.k if args.k is not None else file_k
	if args.colors < 0:
		raise InputError("--colors must be nonnegative")
	decision = decide_graph(g, k, args.colors, solver_options(config))
	if not decision.colorable:
		console.log(f"[INFO] not {k}-path {args.colors}-colorable")
		return EXIT_NEGATIVE
	console.log(f"[OK] {k}-path {args.colors}-colorable")
	if decision.coloring is not None:
		if args.coloring_out is not None:
			write_coloring(args.coloring_out, decision.coloring)
		else:
			sys.stdout.write(serialize_coloring(decision.coloring))
	return EXIT_OK


def cmd_verify(args: argparse.Namespace, config: GlobalConfig, console: Console) -> int:
	g, file_k = read_instance(args.instance)
	k = args.k if args.k is not None else file_k
	coloring = read_coloring(args.coloring, g.n)
	verdict = verify_coloring(g, coloring, k)
	if verdict.valid:
		console.log(f"[OK] valid {k}-path coloring with {coloring.used_colors()} colors")
		return EXIT_OK
	color, bad = verdict.first_violation()
	console.log(f"[ERROR] color {color}: {bad.violation.value} at {list(bad.witness)}")
	return EXIT_NEGATIVE


def cmd_gen(args: argparse.Namespace, config: GlobalConfig, console: Console) -> int:
	gc = config.generator
	n = args.n if args.n is not None else gc.n
	if args.strip:
		ratio = args.non_f_ratio if args.non_f_ratio is not None else gc.strip_non_f_ratio
		inst = generate_strip(n, args.seed, ratio)
	else:
		params = GenParams(
			n=n,
			seed=args.seed,
			pitch=args.pitch if args.pitch is not None else gc.pitch,
			d_lith=args.dlith if args.dlith is not None else gc.d_lith,
			d_dsa_min=args.ddsa if args.ddsa is not None else gc.d_dsa_min,
			fill=args.fill if args.fill is not None else gc.fill,
			max_attempts=gc.max_attempts,
		)
		inst = generate(params)

	if args.out is None:
		sys.stdout.write(serialize_instance(inst.graph, args.k))
		return EXIT_OK
	if config.runtime.dry_run:
		console.log(f"[INFO] dry-run: would write {args.out} (n={inst.graph.n}, m={inst.graph.m})")
		return EXIT_OK
	write_instance(args.out, inst.graph, args.k)
	write_layout(layout_path(args.out), inst.points)
	console.log(f"[OK] wrote {args.out} (n={inst.graph.n}, m={inst.graph.m}, |F|={len(inst.graph.f_edges)})")
	return EXIT_OK


def cmd_stats(args: argparse.Namespace, config: GlobalConfig, console: Console) -> int:
	g, _ = read_instance(args.instance)
	strategy = _parse_strategy(args.strategy) if args.strategy else config.solver.strategy
	st = stats(g, strategy)
	if args.json:
		out = {"schema": JSON_SCHEMA_VERSION, "instance": args.instance.stem, **st.as_dict()}
		out["per_component"] = [vars(c) for c in st.per_component]
		print(json.dumps(out, ensure_ascii=False))
		return EXIT_OK
	_print_stats_table(console, args.instance.stem, st)
	return EXIT_OK


###############################################################################
# Benchmark
###############################################################################

def bench_columns(ks: list[int]) -> list[str]:
	cols = ["name", "n", "m", "f", "omega", "delta", "width"]
	for k in ks:
		cols += [f"chi{k}", f"t{k}"]
	return cols


def bench_instance(path: Path, ks: list[int], repeat: int, opts: SolverOptions) -> dict:
	"""One CSV row: instance statistics plus χ and best-of-repeat time per k."""
	g, _ = read_instance(path)
	st = stats(g, opts.strategy)
	row: dict = {
		"name": path.stem,
		"n": st.n,
		"m": st.m,
		"f": st.f_count,
		"omega": st.omega,
		"delta": st.max_degree,
		"width": st.width,
	}
	for k in ks:
		best = None
		chi = None
		for _ in range(repeat):
			started = time.perf_counter()
			chi = chromatic_number(g, k, opts).chromatic
			elapsed = time.perf_counter() - started
			best = elapsed if best is None else min(best, elapsed)
		row[f"chi{k}"] = chi
		row[f"t{k}"] = round(best, 6)
	return row


def linear_fit(xs: list[float], ys: list[float]) -> tuple[float, float, float]:
	"""Least-squares line through the points: (slope, intercept, R²)."""
	x = np.asarray(xs, dtype=float)
	y = np.asarray(ys, dtype=float)
	slope, intercept = np.polyfit(x, y, 1)
	residual = y - (slope * x + intercept)
	ss_tot = float(np.sum((y - y.mean()) ** 2))
	r2 = 1.0 - float(np.sum(residual ** 2)) / ss_tot if ss_tot > 0 else 1.0
	return float(slope), float(intercept), r2


def cmd_bench(args: argparse.Namespace, config: GlobalConfig, console: Console) -> int:
	if not args.suite.is_dir():
		raise InputError(f"suite directory not found: {args.suite}")
	paths = sorted(args.suite.glob(f"*{INSTANCE_SUFFIX}"), key=lambda p: p.stem)
	if not paths:
		raise InputError(f"no *{INSTANCE_SUFFIX} files in {args.suite}")
	ks = args.k if args.k is not None else config.bench.k
	repeat = config.bench.repeat
	opts = solver_options(config)

	if opts.jobs > 1 and len(paths) > 1:
		inner = replace(opts, jobs=1)
		with ProcessPoolExecutor(max_workers=opts.jobs) as pool:
			futures = [pool.submit(bench_instance, p, ks, repeat, inner) for p in paths]
			rows = [f.result() for f in futures]
	else:
		rows = []
		for p in paths:
			console.info(f"[{p.stem}] benchmarking")
			rows.append(bench_instance(p, ks, repeat, opts))
	rows.sort(key=lambda r: r["name"])

	buf = io.StringIO()
	writer = csv.DictWriter(buf, fieldnames=bench_columns(ks), lineterminator="\n")
	writer.writeheader()
	writer.writerows(rows)
	if args.out is None:
		sys.stdout.write(buf.getvalue())
	elif not config.runtime.dry_run:
		args.out.parent.mkdir(parents=True, exist_ok=True)
		args.out.write_text(buf.getvalue(), encoding="ascii", newline="\n")
		console.log(f"[OK] wrote {args.out}")

	ns = [r["n"] for r in rows]
	if len(set(ns)) >= 2:
		for k in ks:
			ts = [r[f"t{k}"] for r in rows]
			slope, _, r2 = linear_fit(ns, ts)
			lo = min(range(len(rows)), key=lambda i: ns[i])
			hi = max(range(len(rows)), key=lambda i: ns[i])
			ratio = ts[hi] / ts[lo] if ts[lo] > 0 else float("inf")
			console.info(
				f"[INFO] k={k}: time ~ {slope:.3g}s per vertex, R²={r2:.3f}, "
				f"t(n={ns[hi]})/t(n={ns[lo]})={ratio:.2f}"
			)
	return EXIT_OK


COMMANDS = {
	"solve": cmd_solve,
	"decide": cmd_decide,
	"verify": cmd_verify,
	"gen": cmd_gen,
	"stats": cmd_stats,
	"bench": cmd_bench,
}


def _machine_output(args: argparse.Namespace) -> bool:
	if getattr(args, "json", False):
		return True
	if args.command in ("bench", "gen"):
		return args.out is None
	if args.command == "decide":
		return args.certificate and args.coloring_out is None
	return False


def main(argv: list[str] | None = None) -> int:
	"""
	Load config, apply CLI overrides and dispatch to the subcommand.
	Returns the process exit code.
	"""
	args = parse_args(argv)
	console = Console(machine=_machine_output(args))

	try:
		config = load_config_or_default(args.config)
		if config.config_file is not None:
			console.info(f"[OK] Loaded config from {config.config_file}")
	except Exception as e:
		console.log(f"[ERROR] Failed to load config: {e}")
		return EXIT_INPUT
	console.progress = config.logging.progress

	try:
		apply_overrides(config, args, console)
		return COMMANDS[args.command](args, config, console)
	except KeyboardInterrupt:
		console.log("\n[WARN] Interrupted by user")
		return EXIT_INTERRUPTED
	except SolverTimeout as e:
		console.log(f"[ERROR] Time limit reached: {e}")
		return EXIT_TIMEOUT
	except (InputError, OSError) as e:
		console.log(f"[ERROR] {e}")
		return EXIT_INPUT
	except SolverError as e:
		console.log(f"[ERROR] Internal check failed: {e}")
		traceback.print_exc()
		return EXIT_INTERNAL
	except ValueError as e:
		console.log(f"[ERROR] {e}")
		return EXIT_INPUT


if __name__ == "__main__":
	sys.exit(main())
