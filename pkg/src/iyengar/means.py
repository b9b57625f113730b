"""Special means and the mean-value inequalities they satisfy for f(x) = x**n.

For ``f(x) = x**n`` the trapezoid defect on ``[a, b]`` is
``A(a**n, b**n) - L_n(a, b)**n`` and ``|f''| = n(n-1)|x|**(n-2)``, so each of
the three endpoint bounds turns into an inequality between means.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .bounds import HolderPair, Interval, V1_FRONTIER, beta, v1_constant
from .errors import DomainError, ValidityError
from .functions import FunctionSpec, is_quasiconvex

EQUALITY_TOL = 1e-12


class Proposition(str, enum.Enum):
    P5 = "P5"  # Hoelder split
    P6 = "P6"  # power mean
    P7 = "P7"  # weighted Hoelder


def arithmetic_mean(a: float, b: float) -> float:
    return (a + b) / 2.0


def logarithmic_mean(a: float, b: float) -> float:
    if a == 0 or b == 0 or abs(a) == abs(b):
        raise DomainError(f"logarithmic mean needs a, b != 0 and |a| != |b|, got ({a}, {b})")
    return (a - b) / (math.log(abs(a)) - math.log(abs(b)))


def generalized_log_mean(a: float, b: float, n: int) -> float:
    """``[(b**(n+1) - a**(n+1)) / ((n+1)(b-a))] ** (1/n)``."""
    if a == b:
        raise DomainError("generalized log-mean needs a != b")
    if n != int(n) or n in (-1, 0):
        raise DomainError(f"generalized log-mean needs integer n not in {{-1, 0}}, got {n}")
    n = int(n)
    bracket = power_mean_value(a, b, n)
    if bracket > 0:
        return bracket ** (1.0 / n)
    if n % 2 == 1:
        return -((-bracket) ** (1.0 / n))
    raise DomainError(f"no real {n}-th root of the non-positive bracket {bracket}")


def power_mean_value(a: float, b: float, n: int) -> float:
    """``L_n(a, b)**n`` computed directly, i.e. the mean value of ``x**n`` on [a, b]."""
    if a == b:
        raise DomainError("needs a != b")
    n = int(n)
    if n >= 0:
        # sum_{k=0}^{n} a**k b**(n-k) / (n+1) avoids the b - a cancellation
        return math.fsum(a ** k * b ** (n - k) for k in range(n + 1)) / (n + 1)
    return (b ** (n + 1) - a ** (n + 1)) / ((n + 1) * (b - a))


@dataclass(frozen=True)
class MeansCheckRecord:
    proposition: Proposition
    a: float
    b: float
    n: int
    q: float
    lhs: float
    rhs: float
    holds: bool
    margin: float
    quasiconvex: bool = True

    def as_dict(self) -> dict:
        return {"proposition": self.proposition.value, "a": self.a, "b": self.b, "n": self.n,
                "q": self.q, "lhs": self.lhs, "rhs": self.rhs, "holds": self.holds,
                "margin": self.margin, "quasiconvex": self.quasiconvex}


def _endpoint_power(a: float, b: float, n: int, q: float) -> float:
    """``max{|a|**((n-2)q), |b|**((n-2)q)} ** (1/q)``, with ``0**0 = 1``."""
    e = (n - 2) * q
    big = max(abs(a) ** e, abs(b) ** e)  # Python already gives 0.0**0 == 1.0
    return big ** (1.0 / q)


def means_rhs(which: Proposition, a: float, b: float, n: int, q: float) -> float:
    which = Proposition(which)
    scale = n * (n - 1) * (b - a) ** 2
    data = _endpoint_power(a, b, n, q)
    if which is Proposition.P5:
        hp = HolderPair(q) if q > 1 else None
        if hp is None or not hp.v1_valid:
            raise ValidityError(f"P5 needs q > 1 + sqrt(2)/2 = {V1_FRONTIER:.6f}, got {q}")
        return scale / 2.0 * v1_constant(hp) * data
    if which is Proposition.P6:
        if not q >= 1:
            raise DomainError(f"P6 needs q >= 1, got {q}")
        return scale / 4.0 * (2.0 / ((q + 1.0) * (q + 2.0))) ** (1.0 / q) * data
    if not q > 1:
        raise DomainError(f"P7 needs q > 1, got {q}")
    p = HolderPair(q).p
    return scale / 2.0 ** (1.0 + 1.0 / q) * beta(2.0, p + 1.0) ** (1.0 / p) * data


def check_means_proposition(which: Proposition, a: float, b: float, n: int,
                            q: float) -> MeansCheckRecord:
    which = Proposition(which)
    if not a < b:
        raise DomainError(f"need a < b, got ({a}, {b})")
    if n != int(n) or n < 2:
        raise DomainError(f"need integer n >= 2, got {n}")
    n = int(n)
    lhs = abs(arithmetic_mean(a ** n, b ** n) - power_mean_value(a, b, n))
    rhs = means_rhs(which, a, b, n, q)
    margin = rhs - lhs
    # |f''| = n(n-1)|x|**(n-2) is valley-shaped, but the grid verdict is kept
    # on the record so intervals straddling 0 remain auditable.
    verdict = is_quasiconvex(FunctionSpec.polynomial(*([0.0] * n + [1.0])), Interval(a, b), order=2)
    return MeansCheckRecord(which, a, b, n, q, lhs, rhs, margin >= -EQUALITY_TOL, margin,
                            verdict.holds)
