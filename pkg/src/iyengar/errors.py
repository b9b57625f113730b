"""Exception hierarchy shared by every module."""

from __future__ import annotations


class IyengarError(Exception):
    """Base class for all errors raised by this package."""


class DomainError(IyengarError, ValueError):
    """An argument lies outside the domain where a quantity is defined."""


class ValidityError(DomainError):
    """A bound is requested for parameters where its derivation breaks down."""


class EvaluationError(IyengarError, ValueError):
    """A test function cannot be evaluated at the requested point or order."""


class OracleFailure(IyengarError, RuntimeError):
    """The reference integrator could not reach its accuracy target."""


class BudgetExhausted(IyengarError, RuntimeError):
    """Certified integration ran out of refinements before meeting ``eps``.

    The best result found so far is kept on ``best``.
    """

    def __init__(self, message: str, best=None):
        super().__init__(message)
        self.best = best
