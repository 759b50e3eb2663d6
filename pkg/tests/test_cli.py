import json
import subprocess
import sys

import pytest

from potq.benchmarks import porplus_gap_task
from potq.cli import main
from potq.equivalence import read_plans
from potq.task import is_goal, load_sas, replay, write_sas


@pytest.fixture
def cex_file(data_dir):
    return str(data_dir / "cex.sas")


def run_cli(*args, out=None):
    argv = list(args)
    if out is not None:
        argv += ["--output-dir", str(out), "--report", "json"]
    return main(argv)


def report(out):
    return json.loads((out / "report.json").read_text())


def test_por_plus_two_classes(cex_file, tmp_path):
    status = run_cli(
        "--task", cex_file, "--x-regex", "(o2|o3)", "--pruning", "por-plus", "--quality-multiplier", "1", out=tmp_path
    )
    assert status == 0
    assert sorted(p.name for p in tmp_path.glob("sas_plan.*")) == ["sas_plan.1", "sas_plan.2"]
    rep = report(tmp_path)
    assert rep["classes"] == 2
    assert rep["x"] == ["o2", "o3"]
    assert rep["bound"] == 3


def test_plan_files_replay(cex_file, tmp_path):
    assert run_cli("solve", "--task", cex_file, "--x-actions", "o1,o2,o3", out=tmp_path) == 0
    task = load_sas(cex_file)
    plans = read_plans(task, tmp_path)
    assert len(plans) == 3
    for plan in plans:
        end, cost = replay(task, plan.actions)
        assert is_goal(task, end) and cost == plan.cost == 3


def test_naive_unsafe_oracle_check(cex_file, tmp_path, capsys):
    status = run_cli(
        "--task", cex_file, "--x-regex", "o2|o3", "--pruning", "naive-unsafe",
        "--goal-choice", "highest", "--oracle-check", out=tmp_path,
    )
    assert status == 5
    rep = report(tmp_path)
    assert rep["status"] == "unsafe"
    [violation] = rep["safety"]["violations"]
    assert violation["witness_names"] == ["o1", "o2", "o3"]
    assert json.loads(capsys.readouterr().out)["safety"]["covered_class_count"] == 1


def test_por_plus_oracle_flags_gap_task(tmp_path):
    path = tmp_path / "gap.sas"
    path.write_text(write_sas(porplus_gap_task()))
    out = tmp_path / "out"
    assert run_cli("--task", str(path), "--x-regex", "take|fix", "--pruning", "por-plus", "--oracle-check", out=out) == 5
    assert run_cli("--task", str(path), "--x-regex", "take|fix", "--pruning", "pogsss", "--oracle-check",
                   "--exhaustive-safety", out=out) == 0


def test_bad_regex(cex_file, tmp_path, capsys):
    assert run_cli("--task", cex_file, "--x-regex", "(", "--output-dir", str(tmp_path)) == 2
    assert "invalid regular expression" in capsys.readouterr().out


def test_parse_error_exit_code(tmp_path):
    bad = tmp_path / "bad.sas"
    bad.write_text("begin_version\n2\nend_version\n")
    assert run_cli("--task", str(bad), out=tmp_path) == 2
    assert run_cli("--task", str(tmp_path / "missing.sas"), out=tmp_path) == 2


def test_bad_flags_exit_code(cex_file):
    assert main(["solve", "--task", cex_file, "--pruning", "magic"]) == 2
    assert main(["solve", "--task", cex_file, "--x-regex", "o1", "--x-actions", "o1"]) == 2
    assert main(["solve", "--task", cex_file, "--quality-multiplier", "1/2"]) == 2


def test_unsolvable(tmp_path, data_dir):
    text = (data_dir / "cex.sas").read_text().replace("begin_goal\n2\n0 2\n1 1", "begin_goal\n2\n0 2\n1 0")
    text = text.replace("o3\n0\n1\n0 1 0 1", "o3\n0\n1\n0 1 -1 1")
    dead = tmp_path / "dead.sas"
    dead.write_text(text.replace("begin_state\n0\n0", "begin_state\n0\n1"))
    assert run_cli("--task", str(dead), out=tmp_path / "a") == 3
    assert run_cli("--task", str(dead), "--absolute-bound", "5", out=tmp_path / "b") == 3


def test_limits(cex_file, tmp_path):
    assert run_cli("--task", cex_file, "--max-plans", "1", out=tmp_path) == 4
    rep = report(tmp_path)
    assert rep["status"] == "limits"
    assert len(rep["plans"]) == 1
    # cutting plans short makes the result incomplete
    assert run_cli("--task", cex_file, "--max-length", "2", "--absolute-bound", "3", out=tmp_path / "b") == 4
    assert report(tmp_path / "b")["status"] == "incomplete"
    assert run_cli("--task", cex_file, "--node-budget", "2", out=tmp_path / "c") == 4


def test_metrics(cex_file, tmp_path):
    assert run_cli("--task", cex_file, "--x-regex", "o2|o3", "--metrics", out=tmp_path) == 0
    m = report(tmp_path)["metrics"]
    assert (m["tq_size"], m["unordered_size"], m["potq_size"]) == (3, 1, 2)
    assert m["normalized_potq"] == pytest.approx(2 / 3)
    assert m["normalized_unordered"] == pytest.approx(1 / 3)
    assert (m["total_actions"], m["order_important_actions"]) == (3, 2)


def test_reports_are_reproducible(cex_file, tmp_path):
    args = ["--task", cex_file, "--x-regex", "o2|o3", "--pruning", "pogsss", "--metrics", "--oracle-check"]
    run_cli(*args, out=tmp_path / "a")
    run_cli(*args, out=tmp_path / "b")
    a, b = report(tmp_path / "a"), report(tmp_path / "b")
    a.pop("timing"), b.pop("timing")
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert (tmp_path / "a" / "sas_plan.1").read_bytes() == (tmp_path / "b" / "sas_plan.1").read_bytes()


def test_quotient_subcommand(cex_file, tmp_path, capsys):
    found = tmp_path / "found"
    assert run_cli("--task", cex_file, "--x-regex", ".*", out=found) == 0
    capsys.readouterr()
    reduced = tmp_path / "reduced"
    status = main(["quotient", "--task", cex_file, "--plans-dir", str(found), "--x-regex", "o2|o3",
                   "--output-dir", str(reduced), "--report", "json"])
    assert status == 0
    rep = json.loads(capsys.readouterr().out)
    assert (rep["input_plans"], rep["classes"]) == (3, 2)
    assert len(list(reduced.glob("sas_plan.*"))) == 2


def test_text_report(cex_file, tmp_path, capsys):
    assert main(["--task", cex_file, "--x-regex", "o2|o3", "--metrics", "--output-dir", str(tmp_path)]) == 0
    out = capsys.readouterr().out
    assert "classes: 2" in out
    assert "metrics: tq=3 potq=2 unordered=1" in out


def test_module_entry_point(cex_file, tmp_path):
    proc = subprocess.run(
        [sys.executable, "-m", "potq", "--task", cex_file, "--output-dir", str(tmp_path), "--report", "json"],
        capture_output=True, text=True,
    )
    assert proc.returncode == 0, proc.stderr
    # no X given: plans that differ only in order collapse into one class
    assert json.loads(proc.stdout)["classes"] == 1
