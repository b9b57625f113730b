"""Adaptive Gauss-Legendre integrator used as the reference oracle.

Each panel is integrated with 10- and 20-point Gauss-Legendre rules; the
difference is taken as the panel's error estimate (it is really the error of
the 10-point rule, so the accepted 20-point value is conservatively covered).
Panels whose estimate exceeds their share of the tolerance are bisected.
"""

from __future__ import annotations

import heapq
import math
from typing import Callable

import numpy as np

from .errors import OracleFailure

_LO_X, _LO_W = np.polynomial.legendre.leggauss(10)
_HI_X, _HI_W = np.polynomial.legendre.leggauss(20)


def _panel(f: Callable, a: float, b: float) -> tuple[float, float]:
    c, h = 0.5 * (a + b), 0.5 * (b - a)
    hi = h * float(np.dot(_HI_W, f(c + h * _HI_X)))
    lo = h * float(np.dot(_LO_W, f(c + h * _LO_X)))
    return hi, abs(hi - lo)


def adaptive_integrate(f: Callable, a: float, b: float, tol: float = 1e-12,
                       max_panels: int = 20000, breakpoints=()) -> tuple[float, float]:
    """Integrate the vectorised ``f`` over ``[a, b]`` to absolute error ``tol``.

    Returns ``(value, error_estimate)``. Raises :class:`OracleFailure` when the
    panel budget runs out or the integrand produces non-finite values.
    ``breakpoints`` seeds the initial subdivision at known kinks.
    """
    if not a < b:
        raise ValueError("adaptive_integrate needs a < b")
    edges = [a] + sorted(x for x in breakpoints if a < x < b) + [b]
    heap = []
    total = err = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = _panel(f, lo, hi)
        heap.append((-e, lo, hi, val))
        total += val
        err += e
    heapq.heapify(heap)
    n = len(heap)
    while err > tol:
        if n >= max_panels:
            raise OracleFailure(
                f"reference integral did not converge on [{a}, {b}]: "
                f"error estimate {err:.3e} > {tol:.1e} after {n} panels")
        neg_e, lo, hi, val = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise OracleFailure(f"panel [{lo}, {hi}] cannot be bisected further")
        left, el = _panel(f, lo, mid)
        right, er = _panel(f, mid, hi)
        total += left + right - val
        err += el + er + neg_e
        heapq.heappush(heap, (-el, lo, mid, left))
        heapq.heappush(heap, (-er, mid, hi, right))
        n += 1
    if not math.isfinite(total):
        raise OracleFailure(f"non-finite integral on [{a}, {b}]")
    # re-sum to shed drift from the running updates
    total = math.fsum(item[3] for item in heap)
    err = math.fsum(-item[0] for item in heap)
    return total, err
