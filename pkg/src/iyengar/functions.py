"""Test functions with analytic derivatives, a grid quasi-convexity check,
sup-estimation of ``|f''|`` and the reference integral.

Functions are chosen from a closed set of families:

======================  ===========================  ================
family                  f(x)                         selector
======================  ===========================  ================
``POLYNOMIAL``          ``sum c_i x**i``             ``poly:c0,c1,...``
``EXPONENTIAL``         ``c * exp(k x)``             ``exp:c,k``
``RECIPROCAL``          ``1 / (x + s)``              ``recip:s``
``PIECEWISE_G``         ``1`` on ``[-2,-1]``,        ``g``
                        ``x**2`` on ``(-1, 2]``
======================  ===========================  ================
"""

from __future__ import annotations

import enum
import math
import os
from dataclasses import dataclass
from importlib import resources
from typing import Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as P

from .bounds import Interval
from .errors import DomainError, EvaluationError
from .oracle import adaptive_integrate

DEFAULT_GRID_N = 1025
DEFAULT_QC_TOL = 1e-9
REFERENCE_TOL = 1e-12
CORPUS_ENV = "IYENGAR_CORPUS"


class Family(str, enum.Enum):
    POLYNOMIAL = "poly"
    EXPONENTIAL = "exp"
    RECIPROCAL = "recip"
    PIECEWISE_G = "g"


@dataclass(frozen=True)
class FunctionSpec:
    family: Family
    params: tuple[float, ...] = ()
    label: str = ""

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        params = tuple(float(c) for c in self.params)
        object.__setattr__(self, "params", params)
        if not all(math.isfinite(c) for c in params):
            raise DomainError(f"non-finite parameter in {params}")
        expected = {Family.EXPONENTIAL: 2, Family.RECIPROCAL: 1, Family.PIECEWISE_G: 0}
        if family is Family.POLYNOMIAL:
            if not params:
                raise DomainError("polynomial needs at least one coefficient")
        elif len(params) != expected[family]:
            raise DomainError(f"{family.value} takes {expected[family]} parameters, got {len(params)}")
        if not self.label:
            object.__setattr__(self, "label", self.selector)

    @classmethod
    def polynomial(cls, *coeffs: float, label: str = "") -> "FunctionSpec":
        return cls(Family.POLYNOMIAL, coeffs, label)

    @classmethod
    def exponential(cls, c: float, k: float, label: str = "") -> "FunctionSpec":
        return cls(Family.EXPONENTIAL, (c, k), label)

    @classmethod
    def reciprocal(cls, s: float, label: str = "") -> "FunctionSpec":
        return cls(Family.RECIPROCAL, (s,), label)

    @classmethod
    def piecewise_g(cls, label: str = "") -> "FunctionSpec":
        return cls(Family.PIECEWISE_G, (), label)

    @classmethod
    def parse(cls, selector: str, label: str = "") -> "FunctionSpec":
        """Build a spec from ``poly:0,0,1``, ``exp:1,1``, ``recip:1`` or ``g``."""
        name, _, rest = selector.strip().partition(":")
        try:
            family = Family(name.strip().lower())
        except ValueError:
            raise DomainError(f"unknown function family {name!r} in {selector!r}") from None
        try:
            params = tuple(float(tok) for tok in rest.split(",") if tok.strip())
        except ValueError:
            raise DomainError(f"bad parameters in {selector!r}") from None
        return cls(family, params, label)

    @property
    def selector(self) -> str:
        if self.family is Family.PIECEWISE_G:
            return "g"
        return f"{self.family.value}:" + ",".join(f"{c:g}" for c in self.params)

    @property
    def has_second_derivative(self) -> bool:
        return self.family is not Family.PIECEWISE_G

    def check_interval(self, iv: Interval) -> None:
        if self.family is Family.RECIPROCAL:
            pole = -self.params[0]
            if iv.a <= pole <= iv.b:
                raise EvaluationError(f"{self.label}: pole at x={pole} inside [{iv.a}, {iv.b}]")
        elif self.family is Family.PIECEWISE_G:
            if iv.a < -2 or iv.b > 2:
                raise EvaluationError(f"g is defined on [-2, 2] only, got [{iv.a}, {iv.b}]")

    def __call__(self, x, order: int = 0):
        """Vectorised evaluation of ``f``, ``f'`` or ``f''``."""
        if order not in (0, 1, 2):
            raise EvaluationError(f"order must be 0, 1 or 2, got {order}")
        x = np.asarray(x, dtype=float)
        fam = self.family
        if fam is Family.POLYNOMIAL:
            c = np.asarray(self.params)
            if order:
                c = P.polyder(c, order)
            return P.polyval(x, c)
        if fam is Family.EXPONENTIAL:
            c, k = self.params
            return c * k ** order * np.exp(k * x)
        if fam is Family.RECIPROCAL:
            u = x + self.params[0]
            if np.any(u == 0):
                raise EvaluationError(f"{self.label}: evaluation at the pole x={-self.params[0]}")
            return (1.0, -1.0, 2.0)[order] / u ** (order + 1)
        if order:
            raise EvaluationError("g is only evaluable at order 0 (not differentiable at -1)")
        if np.any((x < -2) | (x > 2)):
            raise EvaluationError("g is defined on [-2, 2] only")
        return np.where(x <= -1, 1.0, x * x)


def evaluate(f: FunctionSpec, x: float, order: int = 0) -> float:
    return float(f(x, order))


@dataclass(frozen=True)
class QuasiconvexVerdict:
    holds: bool
    witness: Optional[tuple[float, float, float]]
    grid_size: int
    tolerance: float


def valley_violation(values, tol: float = 0.0) -> Optional[tuple[int, int, int]]:
    """Index triple ``i < j < k`` with ``v[j] > max(v[i], v[k]) + tol``, or None.

    Runs in O(n): the middle point ``j`` is violated exactly when both the
    smallest value to its left and the smallest value to its right sit more
    than ``tol`` below it. The returned ``j`` has the largest excess.
    """
    v = np.asarray(values, dtype=float)
    n = v.size
    if n < 3:
        return None
    left_arg = np.zeros(n, dtype=int)
    right_arg = np.full(n, n - 1, dtype=int)
    best = 0
    for i in range(1, n):
        best = i if v[i] < v[best] else best
        left_arg[i] = best
    best = n - 1
    for i in range(n - 2, -1, -1):
        best = i if v[i] < v[best] else best
        right_arg[i] = best
    j = np.arange(1, n - 1)
    i_idx = left_arg[j - 1]
    k_idx = right_arg[j + 1]
    excess = v[j] - np.maximum(v[i_idx], v[k_idx])
    m = int(np.argmax(excess))
    if excess[m] > tol:
        return int(i_idx[m]), int(j[m]), int(k_idx[m])
    return None


def is_quasiconvex(f: FunctionSpec, iv: Interval, order: int = 0,
                   grid_n: int = DEFAULT_GRID_N, tol: float = DEFAULT_QC_TOL) -> QuasiconvexVerdict:
    """Grid-certified quasi-convexity of ``f`` (order 0) or ``|f''|`` (order 2)."""
    if grid_n < 3:
        raise DomainError("grid_n must be >= 3")
    if order not in (0, 2):
        raise DomainError(f"order must be 0 or 2, got {order}")
    f.check_interval(iv)
    xs = np.linspace(iv.a, iv.b, grid_n)
    vals = f(xs, order)
    if order == 2:
        vals = np.abs(vals)
    hit = valley_violation(vals, tol)
    witness = None if hit is None else tuple(float(xs[i]) for i in hit)
    return QuasiconvexVerdict(holds=hit is None, witness=witness, grid_size=grid_n, tolerance=tol)


def sup_abs_d2(f: FunctionSpec, iv: Interval, grid_n: int = DEFAULT_GRID_N) -> float:
    """Grid maximum of ``|f''|`` including both endpoints.

    This is a lower estimate of the true supremum; it is exact whenever
    ``|f''|`` is monotone or quasi-convex on ``iv``, since the maximum then
    sits at an endpoint.
    """
    if grid_n < 2:
        raise DomainError("grid_n must be >= 2")
    f.check_interval(iv)
    return float(np.max(np.abs(f(np.linspace(iv.a, iv.b, grid_n), 2))))


def reference_integral(f: FunctionSpec, iv: Interval, tol: float = REFERENCE_TOL) -> float:
    """``integral_a^b f``: exact antiderivative where available, adaptive otherwise."""
    f.check_interval(iv)
    a, b = iv.a, iv.b
    if f.family is Family.POLYNOMIAL:
        anti = P.polyint(np.asarray(f.params))
        # evaluate the difference term-wise to avoid cancellation between F(b) and F(a)
        return math.fsum(c * (b ** i - a ** i) for i, c in enumerate(anti) if i)
    if f.family is Family.EXPONENTIAL:
        c, k = f.params
        if k == 0:
            return c * (b - a)
        return c / k * math.exp(k * a) * math.expm1(k * (b - a))
    breaks = (-1.0,) if f.family is Family.PIECEWISE_G else ()
    value, _ = adaptive_integrate(f, a, b, tol=tol, breakpoints=breaks)
    return value


@dataclass(frozen=True)
class CorpusEntry:
    function: FunctionSpec
    interval: Interval

    @property
    def label(self) -> str:
        return self.function.label


def parse_manifest(text: str) -> list[CorpusEntry]:
    """Parse corpus manifest lines ``<selector> <a> <b> <label>``.

    Blank lines and ``#`` comments are ignored; the label may contain spaces.
    """
    entries = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split(None, 3)
        if len(parts) < 3:
            raise DomainError(f"manifest line {lineno}: expected '<selector> <a> <b> [label]'")
        selector, a, b = parts[:3]
        label = parts[3].strip() if len(parts) == 4 else ""
        try:
            iv = Interval(float(a), float(b))
        except ValueError as exc:
            raise DomainError(f"manifest line {lineno}: {exc}") from None
        fn = FunctionSpec.parse(selector, label)
        fn.check_interval(iv)
        entries.append(CorpusEntry(fn, iv))
    labels = [e.label for e in entries]
    if len(set(labels)) != len(labels):
        raise DomainError("manifest labels must be unique")
    return entries


def load_corpus(path: Optional[str] = None) -> list[CorpusEntry]:
    """Load a manifest from ``path``, ``$IYENGAR_CORPUS`` or the shipped default."""
    path = path or os.environ.get(CORPUS_ENV)
    if path:
        with open(path, encoding="utf-8") as fh:
            return parse_manifest(fh.read())
    return parse_manifest(resources.files("iyengar").joinpath("corpus.txt").read_text("utf-8"))


def corpus_by_label(entries: Sequence[CorpusEntry], label: str) -> CorpusEntry:
    for e in entries:
        if e.label == label:
            return e
    raise DomainError(f"no corpus entry labelled {label!r}")
