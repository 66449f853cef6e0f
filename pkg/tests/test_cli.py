import csv
import json
from pathlib import Path

import jsonschema
import pytest
from click.testing import CliRunner

from ordagg.analysis import theoretical_bound
from ordagg.cli import CSV_COLUMNS, main
from ordagg.model import validate
from ordagg.serialize import obj_to_instance, obj_to_solution

SCHEMA = json.loads((Path(__file__).parent.parent / "docs" / "report.schema.json").read_text())


@pytest.fixture
def runner():
    return CliRunner()


def _gen(runner, path, *extra):
    args = ["gen", "--kind", "btw", "--n", "9", "--m", "30", "--eps", "0.1",
            "--seed", "5", "--out", str(path), *extra]
    res = runner.invoke(main, args)
    assert res.exit_code == 0, res.output
    return path


def test_gen_is_deterministic(runner, tmp_path):
    a = _gen(runner, tmp_path / "a.json")
    b = _gen(runner, tmp_path / "b.json")
    assert a.read_bytes() == b.read_bytes()


def test_gen_writes_valid_instance(runner, tmp_path):
    p = _gen(runner, tmp_path / "inst.json")
    inst, meta = obj_to_instance(json.loads(p.read_text()))
    assert validate(inst) == []
    assert len(inst.constraints) == 30
    assert meta["eps"] == 0.1 and meta["seed"] == 5
    assert inst.ground_truth is not None


def test_gen_hide_truth(runner, tmp_path):
    p = _gen(runner, tmp_path / "blind.json", "--hide-truth")
    assert "ground_truth" not in json.loads(p.read_text())


def test_gen_rejects_m_for_tree_kinds(runner, tmp_path):
    res = runner.invoke(main, ["gen", "--kind", "triplets", "--n", "8", "--m", "10",
                               "--out", str(tmp_path / "x.json")])
    assert res.exit_code == 2
    assert "--m1/--m2" in res.output


def test_gen_rejects_bad_rate(runner, tmp_path):
    res = runner.invoke(main, ["gen", "--kind", "mas", "--n", "5", "--m", "4",
                               "--eps", "1.5", "--out", str(tmp_path / "x.json")])
    assert res.exit_code == 2


def test_solve_writes_solution_and_report(runner, tmp_path):
    inst_path = _gen(runner, tmp_path / "inst.json")
    out = tmp_path / "sol.json"
    res = runner.invoke(main, ["solve", "--in", str(inst_path), "--out", str(out),
                               "--seed", "1", "--restarts", "2", "--hyperplanes", "40"])
    assert res.exit_code == 0, res.output

    sol_obj = json.loads(out.read_text())
    assert sol_obj["kind"] == "btw" and sol_obj["n"] == 9
    ranking = obj_to_solution(sol_obj["solution"])
    assert sorted(ranking.order) == list(range(9))

    report = json.loads((tmp_path / "sol.report.json").read_text())
    jsonschema.validate(report, SCHEMA)
    assert report["total"] == 30
    assert report["fraction"] == pytest.approx(report["satisfied"] / 30)
    assert report["sdp_objective"] >= report["cut_weight"] - 1e-9
    assert report["theoretical_bound"] == pytest.approx(theoretical_bound("btw", 0.1, 30))


def test_solve_respects_report_path(runner, tmp_path):
    inst_path = _gen(runner, tmp_path / "inst.json")
    out = tmp_path / "sol.json"
    rep = tmp_path / "deep" / "r.json"
    rep.parent.mkdir()
    res = runner.invoke(main, ["solve", "--in", str(inst_path), "--out", str(out),
                               "--report", str(rep), "--restarts", "1",
                               "--hyperplanes", "20"])
    assert res.exit_code == 0, res.output
    jsonschema.validate(json.loads(rep.read_text()), SCHEMA)


def test_solve_empty_instance_omits_fraction(runner, tmp_path):
    inst_path = tmp_path / "empty.json"
    res = runner.invoke(main, ["gen", "--kind", "mas", "--n", "6", "--m", "0",
                               "--out", str(inst_path)])
    assert res.exit_code == 0, res.output
    out = tmp_path / "sol.json"
    res = runner.invoke(main, ["solve", "--in", str(inst_path), "--out", str(out),
                               "--restarts", "1", "--hyperplanes", "10"])
    assert res.exit_code == 0, res.output
    report = json.loads((tmp_path / "sol.report.json").read_text())
    jsonschema.validate(report, SCHEMA)
    assert "fraction" not in report
    assert report["total"] == 0


def test_solve_rejects_broken_instance(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "version": 1, "kind": "mas", "n": 3,
        "constraints": [{"t": "prec", "a": 0, "b": 9}],
    }))
    res = runner.invoke(main, ["solve", "--in", str(bad), "--out", str(tmp_path / "s.json")])
    assert res.exit_code == 2
    assert "out of range" in res.output


def test_solve_rejects_wrong_version(runner, tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"version": 9, "kind": "mas", "n": 3, "constraints": []}))
    res = runner.invoke(main, ["solve", "--in", str(bad), "--out", str(tmp_path / "s.json")])
    assert res.exit_code == 2


def _read_csv(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_bench_csv_layout(runner, tmp_path):
    out = tmp_path / "bench.csv"
    res = runner.invoke(main, ["bench", "--kinds", "mas,btw", "--n", "8", "--m", "14",
                               "--eps-grid", "0.0,0.4", "--seeds", "2", "--out", str(out)])
    assert res.exit_code == 0, res.output
    with open(out, newline="") as fh:
        header = next(csv.reader(fh))
    assert header == CSV_COLUMNS
    rows = _read_csv(out)
    # per (kind, eps): seeds data rows then one aggregate
    assert len(rows) == 2 * 2 * (2 + 1)
    for i in range(0, len(rows), 3):
        block = rows[i:i + 3]
        assert [r["row_type"] for r in block] == ["data", "data", "aggregate"]
        assert [r["seed"] for r in block] == ["0", "1", ""]
        assert block[2]["satisfied_fraction_std"] != ""
        fracs = [float(r["satisfied_fraction"]) for r in block[:2]]
        assert float(block[2]["satisfied_fraction"]) == pytest.approx(sum(fracs) / 2)


def test_bench_tree_rows_carry_class_fractions(runner, tmp_path):
    out = tmp_path / "bench.csv"
    res = runner.invoke(main, ["bench", "--kinds", "triplets", "--n", "7", "--m", "8",
                               "--seeds", "1", "--out", str(out)])
    assert res.exit_code == 0, res.output
    rows = _read_csv(out)
    data = [r for r in rows if r["row_type"] == "data"]
    assert data and all(r["forbidden_fraction"] != "" for r in data)
    assert all(r["desired_fraction"] != "" for r in data)


def test_bench_thread_pool_matches_serial(runner, tmp_path, monkeypatch):
    args = ["bench", "--kinds", "mas,cc", "--n", "8", "--m", "12",
            "--eps-grid", "0.0,0.3", "--seeds", "2"]
    serial = tmp_path / "serial.csv"
    res = runner.invoke(main, args + ["--out", str(serial)])
    assert res.exit_code == 0, res.output
    monkeypatch.setenv("ORDAGG_THREADS", "4")
    pooled = tmp_path / "pooled.csv"
    res = runner.invoke(main, args + ["--out", str(pooled)])
    assert res.exit_code == 0, res.output

    def strip_timing(path):
        return [{k: v for k, v in row.items() if k != "wall_ms"} for row in _read_csv(path)]

    assert strip_timing(serial) == strip_timing(pooled)


def test_bench_rejects_unknown_kind(runner, tmp_path):
    res = runner.invoke(main, ["bench", "--kinds", "mas,ranked", "--n", "6", "--m", "5",
                               "--out", str(tmp_path / "x.csv")])
    assert res.exit_code == 2


def test_oracle_report(runner, tmp_path):
    out = tmp_path / "oracle.json"
    res = runner.invoke(main, ["oracle", "--kind", "mas", "--n", "5", "--m", "8",
                               "--count", "3", "--out", str(out)])
    assert res.exit_code == 0, res.output
    report = json.loads(out.read_text())
    assert report["count"] == 3 and len(report["cells"]) == 3
    for cell in report["cells"]:
        assert cell["solver_satisfied"] <= cell["oracle_satisfied"]
        assert cell["total"] == 8
        assert "flagged" in cell


def test_oracle_cap_exit_code(runner):
    res = runner.invoke(main, ["oracle", "--kind", "triplets", "--n", "9",
                               "--m1", "3", "--m2", "3"])
    assert res.exit_code == 3
    assert "n <= 6" in res.output


def test_oracle_stdout_default(runner):
    res = runner.invoke(main, ["oracle", "--kind", "cc", "--n", "4", "--m", "5",
                               "--count", "2"])
    assert res.exit_code == 0, res.output
    report = json.loads(res.output)
    assert report["kind"] == "cc" and report["count"] == 2
