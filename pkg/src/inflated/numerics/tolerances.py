from __future__ import annotations

from dataclasses import dataclass, replace

from ..errors import UsageError


@dataclass(frozen=True)
class Tolerances:
    """Accuracy targets and work budget for the numerical kernels.

    ``max_steps`` is read as the evaluation budget for quadrature, the
    step budget for the ODE integrator and the iteration budget for root
    finding.
    """

    abs_tol: float = 1e-10
    rel_tol: float = 1e-10
    max_steps: int = 1_000_000

    def __post_init__(self) -> None:
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise UsageError(f"tolerances must be positive, got {self.abs_tol}, {self.rel_tol}")
        if self.max_steps < 1:
            raise UsageError(f"max_steps must be >= 1, got {self.max_steps}")

    def scaled(self, factor: float) -> "Tolerances":
        """Both tolerances multiplied by ``factor``; the budget is unchanged."""
        return replace(self, abs_tol=self.abs_tol * factor, rel_tol=self.rel_tol * factor)


DEFAULT_TOL = Tolerances()
