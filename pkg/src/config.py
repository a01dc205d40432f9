from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path
import yaml

from humanfriendly import parse_timespan

from tree_decomp import Strategy


_OFF_SENTINELS = {"off", "none"}


def _ensure_quantity_expression(expr: str) -> str:
	"""Add a default quantity when a human-friendly duration is missing one."""
	expr = expr.strip()
	if not expr:
		raise ValueError("empty duration expression")
	if any(ch.isdigit() for ch in expr):
		return expr
	return f"1 {expr}"


def _parse_optional_duration(value) -> float | None:
	"""
	Parse a duration that can be disabled with "off", 0 or null.
	Numbers are seconds; strings go through humanfriendly.
	"""
	if value is None:
		return None
	if isinstance(value, bool):
		if value:
			raise ValueError("Boolean true is not a valid duration")
		return None
	if isinstance(value, (int, float)):
		if value <= 0:
			return None
		return float(value)
	if isinstance(value, str):
		text = value.strip()
		if not text or text.lower() in _OFF_SENTINELS:
			return None
		seconds = parse_timespan(_ensure_quantity_expression(text))
		return seconds if seconds > 0 else None
	raise TypeError(f"Unsupported duration type: {type(value)!r}")


def _parse_strategy(value) -> Strategy:
	try:
		return Strategy(str(value).strip().lower())
	except ValueError:
		choices = ", ".join(s.value for s in Strategy)
		raise ValueError(f"unknown strategy {value!r} (expected one of: {choices})") from None


def _parse_k_list(value) -> list[int]:
	if isinstance(value, int) and not isinstance(value, bool):
		value = [value]
	if not isinstance(value, list) or not value:
		raise TypeError("bench.k must be an integer or a non-empty list of integers")
	ks = [int(k) for k in value]
	if any(k < 0 for k in ks):
		raise ValueError("bench.k values must be nonnegative")
	return ks


###############################################################################
# Solver
###############################################################################

@dataclass
class SolverConfig:
	strategy: Strategy = Strategy.BEST_OF_BOTH
	symmetry: bool = True               # colour relabelling inside tables
	split: bool = True                  # cut along non-fusable bridges
	certificate: bool = False
	jobs: int = 1
	time_limit: float | None = None     # seconds, None = unlimited
	check_traces: bool = False          # validate every trace the tables produce


###############################################################################
# Oracle
###############################################################################

@dataclass
class OracleConfig:
	max_vertices: int = 15


###############################################################################
# Generator defaults
###############################################################################

@dataclass
class GeneratorConfig:
	n: int = 1000
	pitch: int = 100
	d_lith: int = 135
	d_dsa_min: int = 103
	fill: float = 0.42
	max_attempts: int = 0
	strip_non_f_ratio: float = 0.1


###############################################################################
# Benchmark
###############################################################################

@dataclass
class BenchConfig:
	k: list[int] = field(default_factory=lambda: [1, 2])
	repeat: int = 1


###############################################################################
# Logging / paths
###############################################################################

@dataclass
class LoggingConfig:
	run_log: Path | None = None         # JSONL, one record per solved instance
	progress: bool = True


@dataclass
class RuntimeConfig:
	dry_run: bool = False


###############################################################################
# Global config root
###############################################################################

@dataclass
class GlobalConfig:
	solver: SolverConfig = field(default_factory=SolverConfig)
	oracle: OracleConfig = field(default_factory=OracleConfig)
	generator: GeneratorConfig = field(default_factory=GeneratorConfig)
	bench: BenchConfig = field(default_factory=BenchConfig)
	logging: LoggingConfig = field(default_factory=LoggingConfig)
	runtime: RuntimeConfig = field(default_factory=RuntimeConfig)

	config_file: Path | None = None


###############################################################################
# Loader
###############################################################################

def load_config(path: str | Path) -> GlobalConfig:
	"""
	Read a YAML configuration file and return a populated GlobalConfig.

	Unknown sections and keys are ignored; bad enum values and durations
	raise ValueError.
	"""
	p = Path(path)
	if not p.exists():
		raise FileNotFoundError(f"Config file not found: {p}")

	with p.open("r", encoding="utf-8") as f:
		raw = yaml.safe_load(f) or {}

	cfg = GlobalConfig()
	cfg.config_file = p

	# --- solver -------------------------------------------------------
	if "solver" in raw:
		r = raw["solver"] or {}
		if "strategy" in r:
			cfg.solver.strategy = _parse_strategy(r["strategy"])
		for key in ("symmetry", "split", "certificate", "check_traces"):
			if key in r:
				setattr(cfg.solver, key, bool(r[key]))
		if "jobs" in r:
			jobs = int(r["jobs"])
			if jobs < 1:
				raise ValueError("solver.jobs must be at least 1")
			cfg.solver.jobs = jobs
		if "time_limit" in r:
			cfg.solver.time_limit = _parse_optional_duration(r["time_limit"])

	# --- oracle -------------------------------------------------------
	if "oracle" in raw:
		r = raw["oracle"] or {}
		cfg.oracle.max_vertices = int(r.get("max_vertices", cfg.oracle.max_vertices))

	# --- generator ----------------------------------------------------
	if "generator" in raw:
		r = raw["generator"] or {}
		for key in ("n", "pitch", "d_lith", "d_dsa_min", "max_attempts"):
			if key in r:
				setattr(cfg.generator, key, int(r[key]))
		for key in ("fill", "strip_non_f_ratio"):
			if key in r:
				setattr(cfg.generator, key, float(r[key]))

	# --- bench --------------------------------------------------------
	if "bench" in raw:
		r = raw["bench"] or {}
		if "k" in r:
			cfg.bench.k = _parse_k_list(r["k"])
		if "repeat" in r:
			repeat = int(r["repeat"])
			if repeat < 1:
				raise ValueError("bench.repeat must be at least 1")
			cfg.bench.repeat = repeat

	# --- logging ------------------------------------------------------
	if "logging" in raw:
		r = raw["logging"] or {}
		if "run_log" in r:
			cfg.logging.run_log = Path(r["run_log"]) if r["run_log"] else None
		if "progress" in r:
			cfg.logging.progress = bool(r["progress"])

	# --- runtime ------------------------------------------------------
	if "runtime" in raw:
		r = raw["runtime"] or {}
		cfg.runtime.dry_run = bool(r.get("dry_run", cfg.runtime.dry_run))

	return cfg


def load_config_or_default(path: str | Path | None, default_name: str = "config.yaml") -> GlobalConfig:
	"""An explicit path must exist; the implicit default may be missing."""
	if path is not None:
		return load_config(path)
	if Path(default_name).exists():
		return load_config(default_name)
	return GlobalConfig()
