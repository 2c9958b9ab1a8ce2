"""Numerical kernels: quadrature, bracketed roots, finite differences and a
dense-output ODE solver."""

from .differences import central_difference
from .ode import DenseTrajectory, integrate_ode
from .quadrature import QuadratureResult, integrate_adaptive, integrate_singular_endpoint
from .roots import find_root_bracketed
from .tolerances import DEFAULT_TOL, Tolerances

__all__ = [
    "DEFAULT_TOL",
    "DenseTrajectory",
    "QuadratureResult",
    "Tolerances",
    "central_difference",
    "find_root_bracketed",
    "integrate_adaptive",
    "integrate_ode",
    "integrate_singular_endpoint",
]
