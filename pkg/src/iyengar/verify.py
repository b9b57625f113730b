"""Verification harness: sweep a corpus over a q-grid and check every bound
against the reference integral.

A record is a VIOLATION when the actual trapezoid defect exceeds the best
bound by more than ``VIOLATION_THRESHOLD`` *and* the grid says ``|f''|`` is
quasi-convex (otherwise the hypothesis is unmet and the record is only kept
for information).
"""

from __future__ import annotations

import csv
import io
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

from .bounds import (Exponent, HolderPair, Interval, SecondDerivEndpoints, Winner, best_bound,
                     bound_v2, bound_v2_limit, power_mean_factor, sup_bound)
import numpy as np

from .errors import IyengarError, OracleFailure
from .functions import CorpusEntry, FunctionSpec, is_quasiconvex, reference_integral
from .oracle import adaptive_integrate

SCHEMA_VERSION = 1
VIOLATION_THRESHOLD = 1e-10
LEMMA_TOL = 1e-12
DEFAULT_Q_GRID = (1.0, 1.5, 1.75, 2.0, 3.0, 5.0, 10.0)

RECORD_FIELDS = (
    "function_label", "selector", "a", "b", "q", "lhs_error", "v1", "v2_proof",
    "v2_statement", "v3", "limit_bound", "best", "winner", "margin",
    "quasiconvex_verdict", "negative_domain_flag", "violation", "error",
)


@dataclass(frozen=True)
class VerificationRecord:
    function_label: str
    selector: str
    interval: Interval
    q: float
    lhs_error: float = math.nan
    v1: Optional[float] = None
    v2_proof: Optional[float] = None
    v2_statement: Optional[float] = None
    v3: Optional[float] = None
    limit_bound: Optional[float] = None
    best: float = math.nan
    winner: Optional[str] = None
    margin: float = math.nan
    quasiconvex_verdict: bool = False
    negative_domain_flag: bool = False
    error: Optional[str] = None

    @property
    def violation(self) -> bool:
        return self.quasiconvex_verdict and self.margin < -VIOLATION_THRESHOLD

    def as_dict(self) -> dict:
        d = {k: v for k, v in asdict(self).items() if k != "interval"}
        d["a"], d["b"] = self.interval.a, self.interval.b
        d["violation"] = self.violation
        return {k: None if isinstance(d[k], float) and math.isnan(d[k]) else d[k]
                for k in RECORD_FIELDS}


def trapezoid_defect(f: FunctionSpec, iv: Interval) -> float:
    """``(f(a) + f(b))/2 - mean of f on [a, b]`` (signed)."""
    fa, fb = float(f(iv.a)), float(f(iv.b))
    return 0.5 * (fa + fb) - reference_integral(f, iv) / iv.length


def lemma_identity(f: FunctionSpec, iv: Interval) -> tuple[float, float]:
    """Both sides of the kernel identity for the trapezoid defect.

    Right side: ``(b-a)**2/2 * integral_0^1 t(1-t) f''(t a + (1-t) b) dt``,
    integrated numerically.
    """
    lhs = trapezoid_defect(f, iv)
    a, b = iv.a, iv.b

    def kernel(t):
        return t * (1.0 - t) * f(t * a + (1.0 - t) * b, 2)

    integral, _ = adaptive_integrate(kernel, 0.0, 1.0, tol=LEMMA_TOL)
    return lhs, iv.length ** 2 / 2.0 * integral


def lemma_identity_residual(f: FunctionSpec, iv: Interval) -> float:
    lhs, rhs = lemma_identity(f, iv)
    return abs(lhs - rhs)


def _verdict_and_d2(f: FunctionSpec, iv: Interval):
    verdict = is_quasiconvex(f, iv, order=2).holds
    d2 = SecondDerivEndpoints(abs(float(f(iv.a, 2))), abs(float(f(iv.b, 2))))
    return verdict, d2


def make_record(f: FunctionSpec, iv: Interval, q: float, lhs_error: float,
                verdict: bool, d2: SecondDerivEndpoints) -> VerificationRecord:
    base = dict(function_label=f.label, selector=f.selector, interval=iv, q=q,
                negative_domain_flag=iv.negative, quasiconvex_verdict=verdict)
    try:
        bb = best_bound(iv, q, d2)
        return VerificationRecord(
            **base, lhs_error=lhs_error, v1=bb.v1, v2_proof=bb.v2,
            v2_statement=bound_v2(iv, q, d2, Exponent.STATEMENT), v3=bb.v3,
            limit_bound=bound_v2_limit(iv, q, d2), best=bb.best, winner=bb.winner.value,
            margin=bb.best - lhs_error)
    except IyengarError as exc:
        return VerificationRecord(**base, lhs_error=lhs_error, error=f"{type(exc).__name__}: {exc}")


def _sweep_entry(args) -> list[VerificationRecord]:
    entry, q_grid = args
    f, iv = entry.function, entry.interval
    try:
        lhs_error = abs(trapezoid_defect(f, iv))
        verdict, d2 = _verdict_and_d2(f, iv)
    except IyengarError as exc:
        msg = f"{type(exc).__name__}: {exc}"
        return [VerificationRecord(f.label, f.selector, iv, q, negative_domain_flag=iv.negative,
                                   error=msg) for q in q_grid]
    return [make_record(f, iv, q, lhs_error, verdict, d2) for q in q_grid]


def sweep(corpus: Sequence[CorpusEntry], q_grid: Sequence[float] = DEFAULT_Q_GRID,
          workers: int = 1) -> list[VerificationRecord]:
    """One record per (entry, q), in corpus order then q order."""
    q_grid = tuple(float(q) for q in q_grid)
    if any(not q >= 1 for q in q_grid):
        raise ValueError(f"q_grid values must be >= 1, got {q_grid}")
    jobs = [(entry, q_grid) for entry in corpus]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            chunks = list(pool.map(_sweep_entry, jobs))  # map keeps submission order
    else:
        chunks = [_sweep_entry(job) for job in jobs]
    return [rec for chunk in chunks for rec in chunk]


def exponent_experiment(records: Iterable[VerificationRecord]) -> dict:
    """Margins of both exponent variants of ``bound_v2``, for records with q > 1."""
    rows = []
    for r in records:
        if r.q <= 1 or r.error is not None:
            continue
        rows.append({
            "function_label": r.function_label, "a": r.interval.a, "b": r.interval.b, "q": r.q,
            "lhs_error": r.lhs_error,
            "proof_margin": r.v2_proof - r.lhs_error,
            "statement_margin": r.v2_statement - r.lhs_error,
            "quasiconvex_verdict": r.quasiconvex_verdict,
        })
    counted = [row for row in rows if row["quasiconvex_verdict"]]
    summary = {
        "rows": len(rows),
        "negative_proof": sum(row["proof_margin"] < -VIOLATION_THRESHOLD for row in counted),
        "negative_statement": sum(row["statement_margin"] < -VIOLATION_THRESHOLD for row in counted),
        "min_proof_margin": min((row["proof_margin"] for row in rows), default=None),
        "min_statement_margin": min((row["statement_margin"] for row in rows), default=None),
    }
    return {"rows": rows, "summary": summary}


def sandwich_check(q_grid: Sequence[float]) -> dict:
    """Check ``(2/((q+1)(q+2)))**(1/q)``: exactly 1/3 at q = 1, strictly in (1/3, 1) above."""
    rows = []
    for q in q_grid:
        q = float(q)
        phi = power_mean_factor(q)
        if q == 1.0:
            ok = abs(phi - 1.0 / 3.0) <= 1e-15
        else:
            ok = 1.0 / 3.0 < phi < 1.0
        rows.append({"q": q, "phi": phi, "ok": ok})
    return {"rows": rows, "passed": all(r["ok"] for r in rows)}


def case_ii_comparison(q_grid: Sequence[float], M: float = 1.0) -> list[dict]:
    """Compare the sup-form Hoelder bound with the power-mean bound under the same ``M``.

    Unit interval; both bounds use ``max`` replaced by ``M``. Purely a report,
    nothing is asserted about which one wins.
    """
    iv = Interval(0.0, 1.0)
    rows = []
    for q in q_grid:
        q = float(q)
        v2 = bound_v2(iv, q, SecondDerivEndpoints(M, M))
        hp = HolderPair(q) if q > 1 else None
        v1 = sup_bound(Winner.V1, iv, hp, M) if hp is not None and hp.v1_valid else None
        if v1 is None:
            smaller = None
        else:
            smaller = "V1" if v1 < v2 else ("V2" if v2 < v1 else "tie")
        rows.append({"q": q, "v1_sup": v1, "v2": v2, "smaller": smaller})
    return rows


@dataclass
class VerificationReport:
    records: list[VerificationRecord]
    sandwich: dict
    experiment: dict
    case_ii: list[dict]
    lemma: list[dict] = field(default_factory=list)

    @property
    def violations(self) -> list[VerificationRecord]:
        return [r for r in self.records if r.violation]

    @property
    def passed(self) -> bool:
        lemma_ok = all(row["ok"] for row in self.lemma)
        return not self.violations and self.sandwich["passed"] and lemma_ok

    def summary(self) -> dict:
        counted = [r for r in self.records if r.error is None and r.quasiconvex_verdict]
        margins = [r.margin for r in counted]
        return {
            "records": len(self.records),
            "counted": len(counted),
            "excluded_not_quasiconvex": sum(1 for r in self.records
                                            if r.error is None and not r.quasiconvex_verdict),
            "errors": sum(1 for r in self.records if r.error is not None),
            "violations": len(self.violations),
            "min_margin": min(margins, default=None),
            "mean_margin": statistics.fmean(margins) if margins else None,
            "negative_domain": sum(1 for r in self.records if r.negative_domain_flag),
            "sandwich_passed": self.sandwich["passed"],
            "lemma_max_residual": max((row["residual"] for row in self.lemma
                                       if row["residual"] is not None), default=None),
            "passed": self.passed,
        }

    def as_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "summary": self.summary(),
            "records": [r.as_dict() for r in self.records],
            "lemma_identity": self.lemma,
            "sandwich": self.sandwich,
            "exponent_experiment": self.experiment,
            "case_ii": self.case_ii,
        }

    def to_json(self) -> str:
        return json.dumps(self.as_dict(), indent=2, allow_nan=False) + "\n"

    def records_csv(self) -> str:
        return records_to_csv(r.as_dict() for r in self.records)

    def human(self) -> str:
        s = self.summary()
        lines = [
            f"records: {s['records']} (counted {s['counted']}, "
            f"not quasi-convex {s['excluded_not_quasiconvex']}, errors {s['errors']})",
            f"violations: {s['violations']}",
            f"min margin: {_fmt(s['min_margin'])}  mean margin: {_fmt(s['mean_margin'])}",
            f"lemma identity max residual: {_fmt(s['lemma_max_residual'])}",
            f"sandwich check: {'ok' if s['sandwich_passed'] else 'FAILED'}",
            "exponent experiment: negative margins proof={negative_proof} "
            "statement={negative_statement}".format(**self.experiment["summary"]),
        ]
        for r in self.violations:
            lines.append(f"VIOLATION {r.function_label} [{r.interval.a}, {r.interval.b}] "
                         f"q={r.q}: error {r.lhs_error!r} > bound {r.best!r}")
        lines.append("PASS" if s["passed"] else "FAIL")
        return "\n".join(lines) + "\n"


def _fmt(x) -> str:
    return "n/a" if x is None else f"{x:.6g}"


def records_to_csv(rows: Iterable[dict]) -> str:
    rows = list(rows)
    buf = io.StringIO()
    if not rows:
        return ""
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: _csv_cell(v) for k, v in row.items()})
    return buf.getvalue()


def _csv_cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return repr(v)
    return v


def holder_weight_study(q: float, max_power: int = 14) -> dict:
    """Truncation study of ``integral_0^1 t**s dt`` with ``s = (q-p)/(q-1)``.

    With ``t = exp(-x)`` the integral becomes ``integral_0^inf exp(-(s+1) x) dx``;
    it is integrated numerically over ``[0, L]`` for ``L = 1, 2, 4, ..., 2**max_power``
    (i.e. truncated at ``t = exp(-L)``). Below the v1 frontier ``s + 1 <= 0`` and
    the partial values blow up; above it they settle on ``1/(s+1)``.
    """
    p = HolderPair(q).p
    c = (q - p) / (q - 1.0) + 1.0

    def integrand(x):
        with np.errstate(over="ignore"):
            return np.exp(-c * x)

    lengths = [0.0] + [float(2 ** k) for k in range(max_power + 1)]
    partials, total = [], 0.0
    for lo, hi in zip(lengths[:-1], lengths[1:]):
        with np.errstate(over="ignore"):
            scale = float(max(1.0, *integrand(np.array([lo, hi])))) * (hi - lo)
        try:
            piece, _ = adaptive_integrate(integrand, lo, hi, tol=1e-14 * scale)
        except OracleFailure:
            piece = math.inf
        total += piece
        partials.append({"truncation_length": hi, "value": total, "increment": piece})
        if math.isinf(total):
            break
    last = partials[-1]["increment"]
    converged = math.isfinite(total) and last <= 1e-12 * max(1.0, total)
    return {"q": q, "p": p, "exponent": c - 1.0, "partials": partials,
            "converged": converged, "value": total if converged else math.inf}


def run_verification(corpus: Sequence[CorpusEntry], q_grid: Sequence[float] = DEFAULT_Q_GRID,
                     workers: int = 1) -> VerificationReport:
    records = sweep(corpus, q_grid, workers=workers)
    lemma = []
    for entry in corpus:
        f, iv = entry.function, entry.interval
        if not f.has_second_derivative:
            continue
        try:
            lhs, rhs = lemma_identity(f, iv)
            residual = abs(lhs - rhs)
            lemma.append({"function_label": f.label, "lhs": lhs, "rhs": rhs,
                          "residual": residual, "ok": residual <= 1e-8})
        except IyengarError as exc:
            lemma.append({"function_label": f.label, "lhs": None, "rhs": None,
                          "residual": None, "ok": False, "error": str(exc)})
    sandwich_grid = sorted({1.0, *[q for q in q_grid if q >= 1]})
    return VerificationReport(
        records=records,
        sandwich=sandwich_check(sandwich_grid),
        experiment=exponent_experiment(records),
        case_ii=case_ii_comparison(q_grid),
        lemma=lemma,
    )
