"""Exception hierarchy shared by all modules.

Every error raised on purpose by this package derives from
:class:`InflatedError`, so callers (the CLI in particular) can map the whole
family to a single "computational failure" exit status.
"""

from __future__ import annotations

from typing import Any


class InflatedError(Exception):
    """Base class for all package errors."""


class UsageError(InflatedError, ValueError):
    """Arguments violate a documented precondition."""


# -- numerics -------------------------------------------------------------


class BudgetExceededError(InflatedError):
    """An iterative kernel ran out of its step/evaluation budget.

    Attributes:
        best_estimate: the best value available when the budget ran out.
        error_estimate: the associated (unconverged) error estimate.
    """

    def __init__(self, message: str, best_estimate: float, error_estimate: float = float("inf")):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.error_estimate = error_estimate


class DivergenceError(BudgetExceededError):
    """The integrand is not integrable under the declared endpoint behaviour."""


class BracketError(InflatedError, ValueError):
    """The root-finding interval does not bracket a sign change."""


class SingularityError(InflatedError):
    """ODE step size collapsed; ``partial`` holds the trajectory computed so far."""

    def __init__(self, message: str, partial: Any = None):
        super().__init__(message)
        self.partial = partial


# -- profile ODE ----------------------------------------------------------


class DegenerateStateError(InflatedError):
    """Curvature too close to zero for a quantity that divides by it."""


class UnreachableCurvatureError(InflatedError):
    """The requested curvature lies beyond a zero of the radicand."""


class NoBranchError(InflatedError):
    """No non-trivial solution passes through zero curvature for these constants."""


class DomainError(InflatedError, ValueError):
    """Argument outside the domain of the function."""


# -- assembly -------------------------------------------------------------


class NoEquatorError(InflatedError):
    """The family member never has vanishing curvature derivative."""


class DegenerateArcError(InflatedError):
    """The arc is too short or too flat for the requested construction."""


class NoSolutionError(InflatedError):
    """Shooting target outside the achievable range.

    Attributes:
        achievable: ``(low, high)`` range of the shooting quantity.
    """

    def __init__(self, message: str, achievable: tuple[float, float]):
        super().__init__(message)
        self.achievable = achievable


# -- symmetry lines -------------------------------------------------------


class SignChangeError(InflatedError):
    """Curvature changes sign inside an interval that needs one sign; split it."""
