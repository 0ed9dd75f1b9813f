import csv
import json

import pytest

from wtsp.cli import main


def rows(text):
    return list(csv.DictReader(line for line in text.splitlines() if not line.startswith("#")))


@pytest.fixture
def inst_file(tmp_path):
    path = tmp_path / "a.wtsp"
    assert main(["generate", "--n", "8", "--placement", "rue", "--class", "C2", "--d", "3",
                 "--placement-seed", "1", "--weight-seed", "2", "--out", str(path)]) == 0
    return path


def test_generate_and_exact(inst_file, tmp_path, capsys):
    tour = tmp_path / "a.tour"
    assert main(["exact", str(inst_file), "--tour-out", str(tour)]) == 0
    (rec,) = rows(capsys.readouterr().out)
    assert rec["method"] == "held-karp" and tour.exists()
    assert main(["audit", str(inst_file), str(tour), "--weighted", rec["weighted_cost"]]) == 0


def test_audit_mismatch_exit_code(inst_file, tmp_path, capsys):
    tour = tmp_path / "a.tour"
    main(["exact", str(inst_file), "--tour-out", str(tour)])
    capsys.readouterr()
    assert main(["audit", str(inst_file), str(tour), "--weighted", "1.0"]) == 3
    assert "mismatch" in capsys.readouterr().err


def test_validation_exit_code(tmp_path, capsys):
    assert main(["generate", "--n", "1", "--out", str(tmp_path / "x")]) == 2
    assert main(["solve", str(tmp_path / "missing.wtsp")]) == 2
    assert "error" in capsys.readouterr().err


@pytest.mark.parametrize("method", ["held-karp", "brute-force", "tsp", "mlp"])
def test_exact_methods(inst_file, capsys, method):
    assert main(["exact", str(inst_file), "--method", method]) == 0
    assert rows(capsys.readouterr().out)[0]["method"] == method


def test_solve_deterministic(inst_file, capsys):
    args = ["solve", str(inst_file), "--mutation", "jump", "--fitness", "tsp", "--budget", "500", "--seed", "4"]
    main(args)
    first = capsys.readouterr().out
    main(args)
    assert capsys.readouterr().out == first
    assert rows(first)[0]["evaluations"] == "500"


def test_approx(inst_file, capsys):
    assert main(["approx", str(inst_file), "--kmode", "exact"]) == 0
    assert len(rows(capsys.readouterr().out)[0]["tour"].split()) == 8


def test_generate_suite(tmp_path):
    manifest = tmp_path / "m.csv"
    assert main(["generate-suite", "--manifest", str(manifest), "--sizes", "25", "--placements", "rue",
                 "--replications", "1", "--limit", "5", "--materialize", str(tmp_path / "inst")]) == 0
    assert len(rows(manifest.read_text())) == 5
    assert len(list((tmp_path / "inst").glob("*.wtsp"))) == 5


def test_experiment_stats_audit(tmp_path, inst_file):
    cfg = tmp_path / "exp.json"
    cfg.write_text(json.dumps({
        "instances": [inst_file.name],
        "algorithms": [{"mutation": "inversion"}, {"mutation": "exchange"}],
        "runs": 3, "seed": 5, "out": "res.csv"}))
    assert main(["experiment", "--config", str(cfg), "--budget", "300"]) == 0
    res = tmp_path / "res.csv"
    recs = rows(res.read_text())
    assert len(recs) == 6 and {r["evaluations"] for r in recs} == {"300"}
    assert main(["stats", str(res), "--out", str(tmp_path / "perf.csv")]) == 0
    assert len(rows((tmp_path / "perf.csv").read_text())) == 2
    assert main(["audit", str(inst_file), "--results", str(res)]) == 0


def test_ratio(tmp_path, inst_file):
    out, summ = tmp_path / "r.csv", tmp_path / "s.csv"
    assert main(["ratio", str(inst_file), "--oracle", "--runs", "1", "--out", str(out),
                 "--summary-out", str(summ)]) == 0
    assert float(rows(out.read_text())[0]["ratio"]) >= 1
    assert rows(summ.read_text())[0]["count"] == "1"


def test_ratio_needs_instances(tmp_path):
    assert main(["ratio", "--out", str(tmp_path / "r.csv")]) == 2
