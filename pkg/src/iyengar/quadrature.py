"""Composite trapezoid/midpoint sums with a-priori error certificates.

On a subinterval of width ``h`` the trapezoid error is ``h`` times the
trapezoid defect, so each local certificate is ``h * best_bound(...)``,
which scales like ``h**3`` times the endpoint data of ``|f''|``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .bounds import Interval, SecondDerivEndpoints, Winner, best_bound
from .errors import BudgetExhausted, DomainError
from .functions import FunctionSpec, QuasiconvexVerdict, is_quasiconvex


@dataclass(frozen=True)
class Partition:
    nodes: tuple[float, ...]

    def __post_init__(self):
        nodes = tuple(float(x) for x in self.nodes)
        object.__setattr__(self, "nodes", nodes)
        if len(nodes) < 2:
            raise DomainError("a partition needs at least two nodes")
        if any(not math.isfinite(x) for x in nodes):
            raise DomainError("partition nodes must be finite")
        if any(b <= a for a, b in zip(nodes[:-1], nodes[1:])):
            raise DomainError("partition nodes must be strictly increasing")

    @property
    def n(self) -> int:
        return len(self.nodes) - 1

    @property
    def widths(self) -> tuple[float, ...]:
        return tuple(b - a for a, b in zip(self.nodes[:-1], self.nodes[1:]))

    @property
    def interval(self) -> Interval:
        return Interval(self.nodes[0], self.nodes[-1])

    def subintervals(self):
        for a, b in zip(self.nodes[:-1], self.nodes[1:]):
            yield Interval(a, b)

    def refined(self) -> "Partition":
        """Insert the midpoint of every subinterval."""
        x = np.asarray(self.nodes)
        out = np.empty(2 * x.size - 1)
        out[0::2] = x
        out[1::2] = 0.5 * (x[:-1] + x[1:])
        return Partition(tuple(out))


def uniform_partition(iv: Interval, n: int) -> Partition:
    if n < 1:
        raise DomainError(f"uniform partition needs n >= 1, got {n}")
    nodes = np.linspace(iv.a, iv.b, n + 1)
    nodes[0], nodes[-1] = iv.a, iv.b
    return Partition(tuple(nodes))


def trapezoid_sum(f: FunctionSpec, d: Partition) -> float:
    x = np.asarray(d.nodes)
    y = np.asarray(f(x), dtype=float)
    return math.fsum(0.5 * (y[:-1] + y[1:]) * np.diff(x))


def midpoint_sum(f: FunctionSpec, d: Partition) -> float:
    x = np.asarray(d.nodes)
    return math.fsum(np.asarray(f(0.5 * (x[:-1] + x[1:])), dtype=float) * np.diff(x))


@dataclass(frozen=True)
class LocalBound:
    index: int
    width: float
    local_bound: float
    winner: Winner


@dataclass(frozen=True)
class Certificate:
    total: float
    per_interval: tuple[LocalBound, ...]
    q: float
    method: str = "trapezoid"

    def as_dict(self) -> dict:
        return {
            "total": self.total,
            "q": self.q,
            "method": self.method,
            "per_interval": [
                {"index": r.index, "width": r.width, "local_bound": r.local_bound,
                 "winner": r.winner.value}
                for r in self.per_interval
            ],
        }


@dataclass(frozen=True)
class CertifiedResult:
    value: float
    certificate: Certificate
    partition: Partition
    refinements: int
    quasiconvex: Optional[QuasiconvexVerdict] = None


def _endpoint_d2(f: FunctionSpec, sub: Interval) -> SecondDerivEndpoints:
    d2 = np.abs(f(np.array([sub.a, sub.b]), 2))
    return SecondDerivEndpoints(float(d2[0]), float(d2[1]))


def interval_certificate(f: FunctionSpec, sub: Interval, q: float) -> tuple[float, Winner]:
    """Error bound for the one-panel trapezoid rule on ``sub``."""
    bb = best_bound(sub, q, _endpoint_d2(f, sub))
    return sub.length * bb.best, bb.winner


def composite_certificate(f: FunctionSpec, d: Partition, q: float) -> Certificate:
    records = []
    for i, sub in enumerate(d.subintervals()):
        local, winner = interval_certificate(f, sub, q)
        records.append(LocalBound(i, sub.length, local, winner))
    total = math.fsum(r.local_bound for r in records)
    return Certificate(total=total, per_interval=tuple(records), q=q)


def integrate_certified(f: FunctionSpec, iv: Interval, q: float, eps: float,
                        max_n: int = 1 << 20) -> CertifiedResult:
    """Trapezoid sum on uniform partitions of doubling size until the certificate is <= eps.

    The bound is only valid when ``|f''|**q`` is quasi-convex on ``iv``; that is
    the caller's job, but a grid verdict is recorded on the result.
    """
    if not eps > 0:
        raise DomainError(f"eps must be > 0, got {eps}")
    verdict = is_quasiconvex(f, iv, order=2)
    n, steps, best = 1, 0, None
    while n <= max_n:
        d = uniform_partition(iv, n)
        cert = composite_certificate(f, d, q)
        best = CertifiedResult(trapezoid_sum(f, d), cert, d, steps, verdict)
        if cert.total <= eps:
            return best
        n *= 2
        steps += 1
    raise BudgetExhausted(
        f"certificate {best.certificate.total:.3e} still above eps={eps:g} at n={best.partition.n}",
        best=best)
