import json
import types

import pytest

import cli
import instances_io
from cli import apply_overrides, bench_columns, cross_check, linear_fit, main, parse_args, warn_if_changed
from config import GlobalConfig
from errors import SolverError, SolverTimeout
from graph_core import Graph
from instances_io import read_coloring, read_instance, write_instance
from oracle import verify_coloring
from tree_decomp import Strategy
from helpers import complete_graph, cycle_graph, path_graph


def _make_args(**overrides):
	defaults = {
		"strategy": None,
		"no_split": False,
		"certificate": False,
		"jobs": None,
		"time_limit": None,
		"repeat": None,
		"dry_run": False,
	}
	defaults.update(overrides)
	return types.SimpleNamespace(**defaults)


@pytest.fixture
def workdir(tmp_path, monkeypatch):
	monkeypatch.chdir(tmp_path)
	return tmp_path


@pytest.fixture
def p3(workdir):
	path = workdir / "p3.kpath"
	write_instance(path, path_graph(3), 1)
	return path


def test_apply_overrides_sets_solver_flags():
	cfg = GlobalConfig()
	args = _make_args(strategy="min_degree", no_split=True, jobs=4, time_limit="2 minutes", repeat=3)

	apply_overrides(cfg, args, cli.Console())

	assert cfg.solver.strategy is Strategy.MIN_DEGREE
	assert cfg.solver.split is False
	assert cfg.solver.jobs == 4
	assert cfg.solver.time_limit == pytest.approx(120.0)
	assert cfg.bench.repeat == 3


def test_apply_overrides_logs_changes(capsys):
	apply_overrides(GlobalConfig(), _make_args(no_split=True), cli.Console())

	assert "[CLI] override split: FALSE" in capsys.readouterr().out


def test_apply_overrides_keeps_config_without_flags():
	cfg = GlobalConfig()

	apply_overrides(cfg, _make_args(), cli.Console())

	assert cfg.solver == GlobalConfig().solver
	assert cfg.runtime.dry_run is False


def test_parse_args_solve_with_several_k():
	args = parse_args(["solve", "x.kpath", "--k", "1", "2", "--json"])

	assert args.command == "solve"
	assert args.k == [1, 2]
	assert args.json is True


def test_bench_columns():
	assert bench_columns([1, 2]) == ["name", "n", "m", "f", "omega", "delta", "width", "chi1", "t1", "chi2", "t2"]


def test_linear_fit_exact_line():
	slope, intercept, r2 = linear_fit([1, 2, 3, 4], [3, 5, 7, 9])

	assert slope == pytest.approx(2.0)
	assert intercept == pytest.approx(1.0)
	assert r2 == pytest.approx(1.0)


###############################################################################
# Commands
###############################################################################

def test_solve_json_report(p3, capsys):
	code = main(["solve", str(p3), "--json", "--k", "0", "1"])

	assert code == 0
	out = json.loads(capsys.readouterr().out)
	assert out["schema"] == 1
	assert out["instance"] == "p3"
	assert out["stats"]["n"] == 3
	assert [(r["k"], r["chromatic"]) for r in out["results"]] == [(0, 2), (1, 2)]
	assert "coloring" not in out["results"][0]


def test_solve_certificate_round_trips_through_verify(p3, workdir, capsys):
	col_path = workdir / "p3.col"

	assert main(["solve", str(p3), "--certificate", "--coloring-out", str(col_path)]) == 0
	g, k = read_instance(p3)
	assert verify_coloring(g, read_coloring(col_path, g.n), k).valid
	assert main(["verify", str(p3), str(col_path)]) == 0


def test_solve_human_output(p3, capsys):
	assert main(["solve", str(p3)]) == 0

	out = capsys.readouterr().out
	assert "[OK] [p3]" in out
	assert "verified" in out


def test_solve_writes_run_log(p3, workdir):
	(workdir / "config.yaml").write_text("logging:\n  run_log: runs.jsonl\n", encoding="utf-8")

	assert main(["solve", str(p3), "--json"]) == 0
	record = json.loads((workdir / "runs.jsonl").read_text(encoding="utf-8").splitlines()[0])
	assert record["instance"] == "p3"
	assert record["results"][0]["chromatic"] == 2

	assert main(["solve", str(p3), "--json", "--dry-run"]) == 0
	assert len((workdir / "runs.jsonl").read_text(encoding="utf-8").splitlines()) == 1


def test_decide_exit_codes(p3):
	assert main(["decide", str(p3), "-L", "1"]) == 1
	assert main(["decide", str(p3), "-L", "2"]) == 0


def test_decide_certificate_goes_to_stdout(p3, capsys):
	assert main(["decide", str(p3), "--colors", "2", "--certificate"]) == 0

	captured = capsys.readouterr()
	lines = captured.out.splitlines()
	assert len(lines) == 3
	assert "[OK]" in captured.err


def test_verify_rejects_tampered_colouring(p3, workdir, capsys):
	bad = workdir / "bad.col"
	bad.write_text("0 0\n1 0\n2 0\n", encoding="ascii")

	assert main(["verify", str(p3), str(bad)]) == 1
	assert "path_too_long" in capsys.readouterr().out.lower()


def test_verify_missing_vertex_is_input_error(p3, workdir):
	partial = workdir / "partial.col"
	partial.write_text("0 0\n1 1\n", encoding="ascii")

	assert main(["verify", str(p3), str(partial)]) == 2


def test_parse_error_exit_code(workdir, capsys):
	broken = workdir / "broken.kpath"
	broken.write_text("p kpath 2 1 1\ne 0 0 1\n", encoding="ascii")

	assert main(["solve", str(broken)]) == 2
	assert "line 2" in capsys.readouterr().out


def test_missing_instance_exit_code(workdir):
	assert main(["stats", str(workdir / "nope.kpath")]) == 2


def test_bad_config_exit_code(workdir):
	assert main(["--config", str(workdir / "nope.yaml"), "stats", "x.kpath"]) == 2


def test_gen_writes_instance_and_layout(workdir):
	out = workdir / "gen" / "a.kpath"

	assert main(["gen", "--n", "30", "--seed", "1", "--out", str(out)]) == 0
	g, k = read_instance(out)
	assert (g.n, k) == (30, 1)
	assert len((workdir / "gen" / "a.layout").read_text(encoding="ascii").splitlines()) == 30


def test_gen_strip_to_stdout(workdir, capsys):
	assert main(["gen", "--strip", "--n", "10", "--k", "2"]) == 0

	assert capsys.readouterr().out.splitlines()[0] == "p kpath 10 17 2"


def test_gen_dry_run_writes_nothing(workdir):
	out = workdir / "a.kpath"

	assert main(["gen", "--n", "10", "--out", str(out), "--dry-run"]) == 0
	assert not out.exists()


def test_stats_json(workdir, capsys):
	path = workdir / "k4.kpath"
	write_instance(path, complete_graph(4), 1)

	assert main(["stats", str(path), "--json"]) == 0
	out = json.loads(capsys.readouterr().out)
	assert (out["omega"], out["delta"], out["width"]) == (4, 3, 3)
	assert len(out["per_component"]) == 1


def test_bench_csv(workdir, capsys):
	suite = workdir / "suite"
	write_instance(suite / "b_c5.kpath", cycle_graph(5), 1)
	write_instance(suite / "a_p3.kpath", path_graph(3), 1)
	(suite / "notes.txt").write_text("ignored", encoding="utf-8")

	assert main(["bench", str(suite), "--k", "0", "1"]) == 0
	lines = capsys.readouterr().out.splitlines()
	assert lines[0] == "name,n,m,f,omega,delta,width,chi0,t0,chi1,t1"
	assert [line.split(",")[0] for line in lines[1:]] == ["a_p3", "b_c5"]
	c5 = lines[2].split(",")
	assert (c5[7], c5[9]) == ("3", "2")


def test_bench_to_file(workdir):
	suite = workdir / "suite"
	write_instance(suite / "p3.kpath", path_graph(3), 1)
	out = workdir / "res" / "bench.csv"

	assert main(["bench", str(suite), "--k", "1", "--out", str(out)]) == 0
	assert out.read_text(encoding="ascii").splitlines()[1].startswith("p3,3,2,2,2,2,1,2,")


def test_bench_empty_suite(workdir):
	(workdir / "empty").mkdir()

	assert main(["bench", str(workdir / "empty")]) == 2


@pytest.mark.parametrize(
	"error, code",
	[
		(KeyboardInterrupt(), 130),
		(SolverTimeout("budget spent"), 4),
		(SolverError("table mismatch"), 3),
	],
)
def test_exception_exit_codes(p3, monkeypatch, error, code):
	def boom(args, config, console):
		raise error

	monkeypatch.setitem(cli.COMMANDS, "solve", boom)

	assert main(["solve", str(p3)]) == code


def test_real_time_limit_gives_timeout_code(workdir):
	path = workdir / "k12.kpath"
	write_instance(path, complete_graph(12), 0)

	assert main(["solve", str(path), "--time-limit", "0.000001 seconds"]) == 4


def test_solve_cross_check(p3, capsys):
	assert main(["solve", str(p3), "--json", "--cross-check"]) == 0

	assert "[OK] brute force agrees" in capsys.readouterr().err


def test_cross_check_catches_mismatch_and_respects_cap():
	with pytest.raises(SolverError):
		cross_check(path_graph(3), 1, 1, 15, cli.Console())

	assert cross_check(path_graph(20), 1, 2, 15, cli.Console()) is False
	assert cross_check(path_graph(3), 1, 2, 15, cli.Console()) is True


def test_split_flag_does_not_change_answers(workdir, capsys):
	g = Graph.from_flagged(6, [(0, 1, True), (1, 2, True), (0, 2, True), (2, 3, False), (3, 4, True), (4, 5, True), (3, 5, True)])
	path = workdir / "bridged.kpath"
	write_instance(path, g, 1)

	assert main(["solve", str(path), "--json", "--k", "0", "1", "2"]) == 0
	split = [r["chromatic"] for r in json.loads(capsys.readouterr().out)["results"]]
	assert main(["solve", str(path), "--json", "--k", "0", "1", "2", "--no-split"]) == 0
	whole = [r["chromatic"] for r in json.loads(capsys.readouterr().out)["results"]]

	assert split == whole == [3, 2, 2]


def test_path_with_k_edges_needs_one_colour(workdir, capsys):
	path = workdir / "p4.kpath"
	write_instance(path, path_graph(4), 3)

	assert main(["solve", str(path), "--json"]) == 0
	assert json.loads(capsys.readouterr().out)["results"][0]["chromatic"] == 1


def test_single_vertex_is_one_colourable(workdir):
	path = workdir / "v1.kpath"
	write_instance(path, Graph.from_edges(1, []), 1)

	assert main(["decide", str(path), "-L", "1"]) == 0


def test_stats_broken_clique_bound_exits_internal(p3, monkeypatch):
	monkeypatch.setattr(instances_io, "clique_number", lambda g: (g.n + 5, False))

	assert main(["stats", str(p3)]) == 3


def test_solve_json_reports_table_sizes(p3, capsys):
	assert main(["solve", str(p3), "--json"]) == 0

	result = json.loads(capsys.readouterr().out)["results"][0]
	sizes = result["table_sizes"]
	assert len(sizes) == result["parts"]
	assert max(max(part) for part in sizes) <= result["peak_table"]
	assert sum(map(sum, sizes)) <= result["total_states"]


def test_solve_warns_when_chi_differs_from_run_log(p3, workdir, capsys):
	(workdir / "config.yaml").write_text("logging:\n  run_log: runs.jsonl\n", encoding="utf-8")
	stale = {"instance": "p3", "results": [{"k": 1, "chromatic": 3}]}
	(workdir / "runs.jsonl").write_text(json.dumps(stale) + "\n", encoding="utf-8")

	assert main(["solve", str(p3)]) == 0
	assert "[WARN] [p3] χ^1 = 2, the last logged run had 3" in capsys.readouterr().out

	assert main(["solve", str(p3)]) == 0
	assert "[WARN]" not in capsys.readouterr().out


def test_warn_if_changed_ignores_unknown_k():
	previous = {"instance": "p3", "results": [{"k": 2, "chromatic": 1}]}
	current = [cli.KResult(1, 2, 1, 1, 3, 9, {})]

	assert warn_if_changed(cli.Console(), "p3", previous, current) == 0
	assert warn_if_changed(cli.Console(), "p3", None, current) == 0
