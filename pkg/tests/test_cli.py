import csv
import io
import json

import pytest

from iyengar.cli import run


def _run(capsys, *argv):
    status = run(list(argv))
    out, err = capsys.readouterr()
    return status, out, err


def test_bound_command(capsys):
    status, out, _ = _run(capsys, "bound", "--a", "0", "--b", "1", "--q", "2",
                          "--d2a", "2", "--d2b", "2", "--format", "json")
    doc = json.loads(out)
    assert status == 0
    assert doc["best"] == pytest.approx(0.1825742, abs=1e-7)
    assert doc["winner"] == "V1"


def test_bound_human_and_negative_note(capsys):
    status, out, _ = _run(capsys, "bound", "--a", "-1", "--b", "1", "--q", "1",
                          "--d2a", "2", "--d2b", "2")
    assert status == 0
    assert "best = " in out and "(V2)" in out and "below 0" in out


def test_integrate_command(capsys):
    status, out, _ = _run(capsys, "integrate", "--fn", "poly:0,0,1", "--a", "0", "--b", "1",
                          "--q", "1", "--eps", "1e-4", "--format", "json")
    doc = json.loads(out)
    assert status == 0
    assert abs(doc["value"] - 1 / 3) <= 1e-4
    assert doc["certificate"] <= 1e-4
    assert doc["n"] == 64 and len(doc["per_interval"]) == 64


def test_integrate_by_corpus_label(capsys):
    status, out, _ = _run(capsys, "integrate", "--label", "exp(x)", "--q", "2", "--eps", "1e-6",
                          "--format", "csv")
    assert status == 0
    (row,) = csv.DictReader(io.StringIO(out))
    assert float(row["true_error"]) <= float(row["certificate"])


def test_means_command(capsys):
    status, out, _ = _run(capsys, "means", "--prop", "P6", "--na", "1", "--nb", "2",
                          "--n", "2", "--q", "1", "--format", "json")
    doc = json.loads(out)
    assert status == 0 and doc["holds"]
    assert doc["lhs"] == pytest.approx(1 / 6, abs=1e-15)
    assert doc["rhs"] == pytest.approx(1 / 6, abs=1e-15)


def test_exit_statuses(capsys):
    assert _run(capsys, "bound", "--a", "0", "--b")[0] == 64
    assert _run(capsys, "bogus")[0] == 64
    assert _run(capsys, "bound", "--a", "0", "--b", "1", "--q", "nan",
                "--d2a", "1", "--d2b", "1")[0] == 64
    assert _run(capsys, "integrate", "--fn", "poly:0,0,1", "--eps", "1e-3")[0] == 64
    # validity / domain errors
    assert _run(capsys, "means", "--prop", "P5", "--na", "1", "--nb", "2",
                "--n", "3", "--q", "1.5")[0] == 1
    assert _run(capsys, "bound", "--a", "1", "--b", "0", "--q", "2",
                "--d2a", "1", "--d2b", "1")[0] == 1
    assert _run(capsys, "integrate", "--fn", "recip:1", "--a", "-2", "--b", "0",
                "--eps", "1e-3")[0] == 1


def test_verify_excludes_non_quasiconvex(capsys, tmp_path):
    # |f''| = 1 - x^2 fails the hypothesis, so its negative margins are not violations
    manifest = tmp_path / "m.txt"
    manifest.write_text("poly:0,0,0.5,0,-0.0833333333333333 -0.9 0.9 hump\n")
    status, out, _ = _run(capsys, "verify", "--corpus", str(manifest))
    assert status == 0 and "violations: 0" in out


def test_verify_writes_report(capsys, tmp_path):
    path = tmp_path / "report.json"
    status, out, _ = _run(capsys, "verify", "--format", "json", "--output", str(path))
    assert status == 0 and out == ""
    doc = json.loads(path.read_text())
    assert doc["summary"]["violations"] == 0
    assert {"records", "sandwich", "exponent_experiment", "lemma_identity"} <= set(doc)


def test_machine_output_is_byte_identical(capsys):
    for fmt in ("json", "csv"):
        _, first, _ = _run(capsys, "verify", "--format", fmt)
        _, second, _ = _run(capsys, "verify", "--format", fmt)
        assert first == second


def test_json_round_trip_fidelity(capsys):
    from iyengar.functions import load_corpus
    from iyengar.verify import run_verification

    report = run_verification(load_corpus())
    _, out, _ = _run(capsys, "verify", "--format", "json")
    doc = json.loads(out)
    for rec, row in zip(report.records, doc["records"]):
        for key in ("lhs_error", "v2_proof", "v2_statement", "best", "margin"):
            assert abs(getattr(rec, key) - row[key]) <= 1e-15 * max(1.0, abs(row[key]))
            assert getattr(rec, key) == row[key]


def test_csv_round_trip(capsys):
    _, out, _ = _run(capsys, "verify", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    from iyengar.functions import load_corpus
    from iyengar.verify import run_verification
    for rec, row in zip(run_verification(load_corpus()).records, rows):
        assert float(row["best"]) == rec.best


def test_corpus_command(capsys, monkeypatch, tmp_path):
    status, out, _ = _run(capsys, "corpus", "--format", "json")
    assert status == 0 and len(json.loads(out)) >= 6
    manifest = tmp_path / "c.txt"
    manifest.write_text("exp:2,1 0 1 two-exp\n")
    monkeypatch.setenv("IYENGAR_CORPUS", str(manifest))
    _, out, _ = _run(capsys, "corpus")
    assert "two-exp" in out


def test_failed_check_exits_2(capsys, monkeypatch):
    import dataclasses

    import iyengar.cli as cli
    from iyengar.means import check_means_proposition

    def broken(*args):
        rec = check_means_proposition(*args)
        return dataclasses.replace(rec, rhs=0.0, margin=-rec.lhs, holds=False)

    monkeypatch.setattr(cli, "check_means_proposition", broken)
    status, out, _ = _run(capsys, "means", "--prop", "P6", "--na", "1", "--nb", "2",
                          "--n", "3", "--q", "1")
    assert status == 2 and "DOES NOT HOLD" in out


def test_oracle_failure_exits_70(capsys, monkeypatch):
    import iyengar.cli as cli
    from iyengar.errors import OracleFailure

    def fail(*args, **kwargs):
        raise OracleFailure("no convergence")

    monkeypatch.setattr(cli, "run_verification", fail)
    assert _run(capsys, "verify")[0] == 70
