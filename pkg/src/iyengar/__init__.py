"""Certified trapezoid-rule error bounds for functions with quasi-convex ``|f''|**q``."""

__version__ = "0.1.0"

from .bounds import (BoundBreakdown, Exponent, HolderPair, Interval, SecondDerivEndpoints,
                     Winner, best_bound, beta, bound_v1, bound_v2, bound_v2_limit, bound_v3,
                     classic_iyengar_bound, conjugate_exponent, ion_bounds, sup_bound)
from .errors import (BudgetExhausted, DomainError, EvaluationError, IyengarError, OracleFailure,
                     ValidityError)
from .functions import FunctionSpec, is_quasiconvex, load_corpus, reference_integral, sup_abs_d2
from .quadrature import (composite_certificate, integrate_certified, midpoint_sum,
                         trapezoid_sum, uniform_partition)

__all__ = [
    "BoundBreakdown", "Exponent", "HolderPair", "Interval", "SecondDerivEndpoints", "Winner",
    "best_bound", "beta", "bound_v1", "bound_v2", "bound_v2_limit", "bound_v3",
    "classic_iyengar_bound", "conjugate_exponent", "ion_bounds", "sup_bound",
    "BudgetExhausted", "DomainError", "EvaluationError", "IyengarError", "OracleFailure",
    "ValidityError", "FunctionSpec", "is_quasiconvex", "load_corpus", "reference_integral",
    "sup_abs_d2", "composite_certificate", "integrate_certified", "midpoint_sum",
    "trapezoid_sum", "uniform_partition",
]
