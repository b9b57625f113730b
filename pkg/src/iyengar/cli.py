"""Command-line front end.

Exit status: 0 success, 1 domain/validity error, 2 violation or failed check,
64 bad usage, 70 reference-integral failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from typing import Optional, Sequence

from . import __version__
from .bounds import (Exponent, Interval, SecondDerivEndpoints, best_bound, bound_v2,
                     bound_v2_limit)
from .errors import BudgetExhausted, IyengarError, OracleFailure
from .functions import FunctionSpec, corpus_by_label, load_corpus, reference_integral
from .means import Proposition, check_means_proposition
from .quadrature import integrate_certified
from .verify import DEFAULT_Q_GRID, records_to_csv, run_verification

EXIT_OK, EXIT_DOMAIN, EXIT_CHECK, EXIT_USAGE, EXIT_ORACLE = 0, 1, 2, 64, 70

log = logging.getLogger("iyengar")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _finite(text: str) -> float:
    try:
        x = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not math.isfinite(x):
        raise argparse.ArgumentTypeError(f"not a finite number: {text!r}")
    return x


def _q_grid(text: str) -> tuple[float, ...]:
    return tuple(_finite(tok) for tok in text.split(",") if tok.strip())


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("human", "json", "csv"), default="human")
    common.add_argument("--output", "-o", help="write the report here instead of stdout")

    parser = _Parser(prog="iyengar", description="Certified trapezoid error bounds.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("bound", parents=[common], help="evaluate the endpoint bounds")
    p.add_argument("--a", type=_finite, required=True)
    p.add_argument("--b", type=_finite, required=True)
    p.add_argument("--q", type=_finite, required=True)
    p.add_argument("--d2a", type=_finite, required=True, help="|f''(a)|")
    p.add_argument("--d2b", type=_finite, required=True, help="|f''(b)|")

    p = sub.add_parser("integrate", parents=[common], help="certified trapezoid integration")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--fn", help="function selector, e.g. poly:0,0,1 or exp:1,1")
    src.add_argument("--label", help="corpus entry label")
    p.add_argument("--a", type=_finite)
    p.add_argument("--b", type=_finite)
    p.add_argument("--q", type=_finite, default=1.0)
    p.add_argument("--eps", type=_finite, required=True)
    p.add_argument("--max-n", type=int, default=1 << 20)
    p.add_argument("--corpus", help="corpus manifest (default: $IYENGAR_CORPUS or shipped)")

    p = sub.add_parser("means", parents=[common], help="check a special-means inequality")
    p.add_argument("--prop", choices=[m.value for m in Proposition], required=True)
    p.add_argument("--na", type=_finite, required=True, help="left endpoint a")
    p.add_argument("--nb", type=_finite, required=True, help="right endpoint b")
    p.add_argument("--n", type=int, required=True, help="power n >= 2")
    p.add_argument("--q", type=_finite, required=True)

    p = sub.add_parser("verify", parents=[common], help="run the verification sweep")
    p.add_argument("--q-grid", type=_q_grid, default=DEFAULT_Q_GRID)
    p.add_argument("--corpus", help="corpus manifest (default: $IYENGAR_CORPUS or shipped)")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("corpus", parents=[common], help="list the corpus functions")
    p.add_argument("--corpus", help="corpus manifest (default: $IYENGAR_CORPUS or shipped)")
    return parser


def _emit(text: str, path: Optional[str]) -> None:
    if path:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _render(rows: list[dict], fmt: str, human_lines: Sequence[str]) -> str:
    if fmt == "json":
        body = rows[0] if len(rows) == 1 else rows
        return json.dumps(body, indent=2) + "\n"
    if fmt == "csv":
        return records_to_csv(rows)
    return "\n".join(human_lines) + "\n"


def _cmd_bound(args) -> tuple[str, int]:
    iv = Interval(args.a, args.b)
    d2 = SecondDerivEndpoints(args.d2a, args.d2b)
    bb = best_bound(iv, args.q, d2)
    row = {"a": iv.a, "b": iv.b, "q": args.q, "d2a": d2.d2a, "d2b": d2.d2b, **bb.as_dict(),
           "v2_statement": bound_v2(iv, args.q, d2, Exponent.STATEMENT),
           "limit_bound": bound_v2_limit(iv, args.q, d2),
           "negative_domain_flag": iv.negative}
    human = [f"v1 = {_h(bb.v1)}", f"v2 = {_h(bb.v2)}", f"v3 = {_h(bb.v3)}",
             f"best = {bb.best!r} ({bb.winner.value})"]
    if iv.negative:
        human.append("note: interval extends below 0")
    return _render([row], args.format, human), EXIT_OK


def _h(x) -> str:
    return "n/a" if x is None else repr(x)


def _cmd_integrate(args) -> tuple[str, int]:
    if args.label:
        entry = corpus_by_label(load_corpus(args.corpus), args.label)
        f = entry.function
        a = entry.interval.a if args.a is None else args.a
        b = entry.interval.b if args.b is None else args.b
    else:
        if args.a is None or args.b is None:
            raise UsageError("--fn requires --a and --b")
        f = FunctionSpec.parse(args.fn)
        a, b = args.a, args.b
    iv = Interval(a, b)
    res = integrate_certified(f, iv, args.q, args.eps, args.max_n)
    reference = reference_integral(f, iv)
    row = {"function": f.selector, "a": a, "b": b, "q": args.q, "eps": args.eps,
           "value": res.value, "certificate": res.certificate.total, "n": res.partition.n,
           "refinements": res.refinements, "reference": reference,
           "true_error": abs(res.value - reference),
           "quasiconvex_verdict": res.quasiconvex.holds}
    if args.format == "json":
        row["per_interval"] = res.certificate.as_dict()["per_interval"]
    human = [f"value = {res.value!r}", f"certificate = {res.certificate.total!r} (n = {res.partition.n})",
             f"true error = {row['true_error']!r}"]
    if not res.quasiconvex.holds:
        human.append("warning: |f''| failed the grid quasi-convexity check")
    status = EXIT_OK if row["true_error"] <= res.certificate.total + 1e-10 else EXIT_CHECK
    return _render([row], args.format, human), status


def _cmd_means(args) -> tuple[str, int]:
    rec = check_means_proposition(Proposition(args.prop), args.na, args.nb, args.n, args.q)
    human = [f"{rec.proposition.value}: lhs = {rec.lhs!r}, rhs = {rec.rhs!r}",
             "holds" if rec.holds else "DOES NOT HOLD"]
    return _render([rec.as_dict()], args.format, human), EXIT_OK if rec.holds else EXIT_CHECK


def _cmd_verify(args) -> tuple[str, int]:
    report = run_verification(load_corpus(args.corpus), args.q_grid, workers=args.workers)
    if args.format == "json":
        text = report.to_json()
    elif args.format == "csv":
        text = report.records_csv()
    else:
        text = report.human()
    return text, EXIT_OK if report.passed else EXIT_CHECK


def _cmd_corpus(args) -> tuple[str, int]:
    rows = [{"label": e.label, "selector": e.function.selector, "a": e.interval.a,
             "b": e.interval.b} for e in load_corpus(args.corpus)]
    human = [f"{r['label']:<16} {r['selector']:<20} [{r['a']!r}, {r['b']!r}]" for r in rows]
    if args.format == "json":
        return json.dumps(rows, indent=2) + "\n", EXIT_OK
    return _render(rows, args.format, human), EXIT_OK


COMMANDS = {"bound": _cmd_bound, "integrate": _cmd_integrate, "means": _cmd_means,
            "verify": _cmd_verify, "corpus": _cmd_corpus}


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        text, status = COMMANDS[args.command](args)
    except UsageError as exc:
        print(f"iyengar: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except OracleFailure as exc:
        print(f"iyengar: oracle failure: {exc}", file=sys.stderr)
        return EXIT_ORACLE
    except BudgetExhausted as exc:
        print(f"iyengar: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except IyengarError as exc:
        print(f"iyengar: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    _emit(text, args.output)
    return status


def main() -> None:
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")
    sys.exit(run())


if __name__ == "__main__":
    main()
