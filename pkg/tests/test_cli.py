import csv
import io
import json

import pytest

from rationalcsp.cli import main
from rationalcsp.fileformat import read_instance, write_instance
from rationalcsp.csp import BinaryConstraint, Instance, is_consistent


@pytest.fixture
def rb_file(tmp_path):
    path = tmp_path / "rb.csp"
    assert main(["generate", "rb", "12", "4", "20", "4", "--seed", "2", "-o", str(path)]) == 0
    return path


def test_generate_rb_deterministic(tmp_path, rb_file):
    other = tmp_path / "again.csp"
    main(["generate", "rb", "12", "4", "20", "4", "--seed", "2", "-o", str(other)])
    assert other.read_text() == rb_file.read_text()


def test_generate_sudoku(tmp_path):
    path = tmp_path / "s.csp"
    assert main(["generate", "sudoku", "2", "2", "6", "--seed", "1", "-o", str(path)]) == 0
    assert read_instance(path).num_variables == 16


def test_solve_prints_solution(rb_file, capsys):
    code = main(["solve", str(rb_file), "--heuristic", "vsc", "--gamma", "0.001", "--json"])
    out = capsys.readouterr().out.splitlines()
    stats = json.loads(out[0])
    assert stats["heuristic"] == "vsc"
    inst = read_instance(rb_file)
    if code == 0:
        labels = [int(x) for x in out[1].split()[1:]]
        assignment = {v: inst.domains[v].index(lab) for v, lab in enumerate(labels)}
        assert is_consistent(inst, assignment)
    else:
        assert code == 1 and out[1] == "unsatisfiable"


def test_solve_unsat_and_timeout(tmp_path, capsys):
    path = tmp_path / "u.csp"
    write_instance(Instance([1, 1], [BinaryConstraint.from_predicate(0, 1, 1, 1, lambda a, b: a != b)]), path)
    assert main(["solve", str(path)]) == 1
    big = tmp_path / "b.csp"
    main(["generate", "rb", "30", "8", "100", "20", "-o", str(big)])
    assert main(["solve", str(big), "--timeout", "0"]) == 2
    assert capsys.readouterr().out.strip().endswith("timeout")


def test_usage_errors(tmp_path, rb_file):
    assert main([]) == 64
    assert main(["solve"]) == 64
    assert main(["solve", str(rb_file), "--heuristic", "nope"]) == 64
    assert main(["bench", str(rb_file), "--heuristics", "mc,zzz"]) == 64
    assert main(["sweep", str(rb_file), "--gammas", "a,b"]) == 64
    assert main(["solve", str(tmp_path / "missing.csp")]) == 64
    assert main(["generate", "rb", "3", "2", "99", "0", "-o", str(tmp_path / "x")]) == 64


def test_parse_error_exit(tmp_path, capsys):
    bad = tmp_path / "bad.csp"
    bad.write_text("csp 1\ndom 0 q\n")
    assert main(["solve", str(bad)]) == 65
    assert "line 2" in capsys.readouterr().err
    bad.write_text("csp 1\ndom 3 1\n")
    assert main(["solve", str(bad)]) == 65


def test_bench_outputs(tmp_path, rb_file, capsys):
    out_csv = tmp_path / "r.csv"
    out_jsonl = tmp_path / "r.jsonl"
    code = main(
        ["bench", str(rb_file), "--heuristics", "mc,sc,vsc", "--repeat", "2", "--csv", str(out_csv), "--jsonl", str(out_jsonl)]
    )
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out_csv.read_text())))
    assert len(rows) == 6
    assert len(out_jsonl.read_text().splitlines()) == 6
    assert "vsc@0.001" in capsys.readouterr().out


def test_sweep_outputs(tmp_path, rb_file, capsys):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", str(rb_file), "--gammas", "0,1e-3,1e6", "--csv", str(out)]) == 0
    rows = list(csv.DictReader(io.StringIO(out.read_text())))
    assert [float(r["gamma"]) for r in rows] == [0.0, 1e-3, 1e6]
    assert float(rows[0]["estimation_ratio_mean"]) == 1.0
    assert float(rows[2]["mean_estimations"]) == 0.0
    assert capsys.readouterr().out == out.read_text()
