import json
import math

import pytest

from iyengar.bounds import Interval, holder_weight_integral
from iyengar.functions import CorpusEntry, FunctionSpec, load_corpus
from iyengar.verify import (DEFAULT_Q_GRID, RECORD_FIELDS, case_ii_comparison, exponent_experiment,
                            holder_weight_study, lemma_identity, lemma_identity_residual,
                            run_verification, sandwich_check, sweep)

X2 = CorpusEntry(FunctionSpec.polynomial(0, 0, 1), Interval(0, 1))
X3 = CorpusEntry(FunctionSpec.polynomial(0, 0, 0, 1), Interval(1, 2))
AFFINE = CorpusEntry(FunctionSpec.polynomial(1, 2), Interval(-1, 3))


def test_lemma_identity_examples():
    lhs, rhs = lemma_identity(X3.function, X3.interval)
    assert lhs == pytest.approx(0.75, abs=1e-12) and rhs == pytest.approx(0.75, abs=1e-12)
    assert lemma_identity_residual(X3.function, X3.interval) <= 1e-8
    assert lemma_identity(AFFINE.function, AFFINE.interval) == pytest.approx((0, 0), abs=1e-12)
    lhs, rhs = lemma_identity(X2.function, X2.interval)
    assert lhs == pytest.approx(1 / 6, abs=1e-12) and rhs == pytest.approx(1 / 6, abs=1e-12)


def test_sweep_examples():
    (rec,) = sweep([X2], [2.0])
    assert rec.lhs_error == pytest.approx(1 / 6, abs=1e-15)
    assert rec.v1 == pytest.approx(0.18257418583505536, abs=1e-12)
    assert rec.margin > 0 and not rec.violation

    for rec in sweep([AFFINE], DEFAULT_Q_GRID):
        assert rec.lhs_error == pytest.approx(0, abs=1e-14)
        assert rec.best >= 0 and not rec.violation

    (rec,) = sweep([X3], [1.0])
    assert rec.lhs_error == pytest.approx(0.75, abs=1e-14)
    assert rec.v2_proof == pytest.approx(1.0, abs=1e-15)
    assert rec.margin == pytest.approx(0.25, abs=1e-14)


def test_sweep_order_and_fields():
    corpus = load_corpus()
    records = sweep(corpus, DEFAULT_Q_GRID)
    keys = [(r.function_label, r.q) for r in records]
    assert keys == [(e.label, q) for e in corpus for q in DEFAULT_Q_GRID]
    assert tuple(records[0].as_dict()) == RECORD_FIELDS
    flagged = {r.function_label for r in records if r.negative_domain_flag}
    assert flagged == {e.label for e in corpus if e.interval.a < 0}


def test_parallel_sweep_matches_serial():
    corpus = load_corpus()
    assert sweep(corpus, DEFAULT_Q_GRID, workers=3) == sweep(corpus, DEFAULT_Q_GRID)


def test_sweep_captures_errors_per_record():
    bad = CorpusEntry(FunctionSpec.piecewise_g(), Interval(-2, 2))
    records = sweep([bad, X2], [1.0, 2.0])
    assert len(records) == 4
    assert records[0].error and "order" in records[0].error
    assert records[2].error is None


def test_non_quasiconvex_records_excluded_from_violations():
    # f'' = 1 - x^2 peaks inside: hypothesis fails, record kept but never a violation
    hump = CorpusEntry(FunctionSpec.polynomial(0, 0, 0.5, 0, -1 / 12), Interval(-0.9, 0.9))
    records = sweep([hump], DEFAULT_Q_GRID)
    assert all(not r.quasiconvex_verdict for r in records)
    assert not any(r.violation for r in records)
    assert any(r.margin < 0 for r in records)


def test_q2_variants_coincide():
    for rec in sweep(load_corpus(), [2.0]):
        assert rec.v2_proof == pytest.approx(rec.v2_statement, abs=1e-12)


def test_exponent_experiment():
    records = sweep([X2], [1.01, 2.0, 4.0])
    exp = exponent_experiment(records)
    rows = {row["q"]: row for row in exp["rows"]}
    assert rows[2.0]["proof_margin"] == pytest.approx(rows[2.0]["statement_margin"], abs=1e-15)
    assert rows[4.0]["statement_margin"] < rows[4.0]["proof_margin"]
    gaps = {q: abs(r["proof_margin"] - r["statement_margin"]) for q, r in rows.items()}
    assert max(gaps, key=gaps.get) == 1.01
    assert exp["summary"]["negative_proof"] == 0


def test_statement_exponent_is_refuted_on_corpus():
    exp = exponent_experiment(sweep(load_corpus(), DEFAULT_Q_GRID))
    assert exp["summary"]["negative_proof"] == 0
    assert exp["summary"]["negative_statement"] > 0


def test_sandwich_check():
    rep = sandwich_check([1.0, 2.0, 100.0])
    phis = [r["phi"] for r in rep["rows"]]
    assert phis[0] == pytest.approx(1 / 3, abs=1e-15)
    assert phis[1] == pytest.approx(math.sqrt(1 / 6), abs=1e-15)
    assert phis[2] == pytest.approx((2 / 10302) ** 0.01, rel=1e-14) and phis[2] < 1
    assert rep["passed"]


def test_case_ii_comparison_is_report_only():
    rows = case_ii_comparison(DEFAULT_Q_GRID)
    assert [r["q"] for r in rows] == list(DEFAULT_Q_GRID)
    assert rows[0]["v1_sup"] is None
    assert {r["smaller"] for r in rows if r["v1_sup"] is not None} <= {"V1", "V2", "tie"}


@pytest.mark.parametrize("q", [1.1, 1.5, 1.7])
def test_holder_weight_study_diverges_below_frontier(q):
    study = holder_weight_study(q)
    assert not study["converged"]
    values = [p["value"] for p in study["partials"]]
    assert values[-1] > 1e6 * values[0]


@pytest.mark.parametrize("q", [1.71, 2.0, 5.0])
def test_holder_weight_study_converges_above_frontier(q):
    study = holder_weight_study(q)
    assert study["converged"]
    assert study["value"] == pytest.approx(holder_weight_integral(q), abs=1e-8)


def test_report_deterministic_and_valid_json():
    corpus = load_corpus()
    first = run_verification(corpus).to_json()
    second = run_verification(corpus).to_json()
    assert first == second
    doc = json.loads(first)
    assert doc["schema_version"] == 1
    assert doc["summary"]["violations"] == 0 and doc["summary"]["passed"]
    assert len(doc["records"]) == len(corpus) * len(DEFAULT_Q_GRID)
