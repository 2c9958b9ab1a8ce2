"""Surface quantities along a planar symmetry line of an inflated surface.

On a symmetry line the second fundamental form is diagonal, with principal
curvature ``k0 = k`` along the line and ``k1`` across it. Writing ``u`` for
the transverse metric factor (known only up to a positive constant), the
Gauss, Codazzi and conservation equations read

    k0 k1 = -u''/u,    k1' = (u'/u)(k0 - k1),    k0'/k0 = u'/u.

The last one makes ``u`` proportional to ``|k0|``, and then Gauss gives
``k1 = -k0''/k0^2``. :func:`residuals` evaluates all three identities on a
solved profile; each vanishes exactly for solutions of the curvature
equation, so the residuals check the whole solving pipeline.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol

import numpy as np

from .errors import DegenerateStateError, SignChangeError, UsageError
from .numerics import central_difference
from .profile_ode import DEGENERATE_EPS

# Floor on |k| relative to max|k| below which residuals are not evaluated.
REL_K_FLOOR = 1e-3


class CurvatureSource(Protocol):
    """Anything exposing ``k``, ``kp``, ``kpp`` callables over ``[0, span]``."""

    span: float

    def k(self, t): ...

    def kp(self, t): ...

    def kpp(self, t): ...


@dataclass(frozen=True)
class AnalyticCurvature:
    """Curvature given by closed-form callables; used for controls and tests."""

    k_fn: Callable
    kp_fn: Callable
    kpp_fn: Callable
    span: float

    def k(self, t):
        return self.k_fn(np.asarray(t, dtype=float))

    def kp(self, t):
        return self.kp_fn(np.asarray(t, dtype=float))

    def kpp(self, t):
        return self.kpp_fn(np.asarray(t, dtype=float))


def perturbed(traj: CurvatureSource, amplitude: float, waves: float = 1.0) -> AnalyticCurvature:
    """``k + amplitude*sin(2 pi waves t/span)`` that still claims the original ``k''``.

    The second derivative is taken from the source unchanged, so the result
    is not a solution and the Gauss residual picks up the perturbation.
    """
    w = 2.0 * math.pi * waves / traj.span
    return AnalyticCurvature(
        lambda t: traj.k(t) + amplitude * np.sin(w * t),
        lambda t: traj.kp(t) + amplitude * w * np.cos(w * t),
        traj.kpp,
        traj.span,
    )


def second_curvature(k: float, kpp: float, eps: float = DEGENERATE_EPS) -> float:
    """Transverse principal curvature ``k1 = -k''/k^2``.

    Raises:
        DegenerateStateError: ``|k| <= eps``.
    """
    if abs(k) <= eps:
        raise DegenerateStateError(f"|k|={abs(k):.3e} <= {eps:g}: k1 is unbounded at a pole")
    return -kpp / (k * k)


@dataclass(frozen=True)
class SymmetryLineData:
    t: np.ndarray
    k0: np.ndarray
    k1: np.ndarray
    u: np.ndarray


def transverse_factor(traj: CurvatureSource, t0: float = 0.0, t1: float | None = None,
                      n: int = 65) -> SymmetryLineData:
    """``k0``, ``k1`` and ``u = |k0|`` sampled on ``[t0, t1]``, ``u = 1`` at the midpoint.

    Raises:
        SignChangeError: ``k`` vanishes or changes sign on the interval.
    """
    t1 = traj.span if t1 is None else t1
    if not (0.0 <= t0 < t1 <= traj.span * (1 + 1e-12)) or n < 2:
        raise UsageError(f"bad sampling interval [{t0}, {t1}] with n={n}")
    t = np.linspace(t0, t1, n)
    k = np.asarray(traj.k(t), dtype=float)
    if np.any(k == 0.0) or np.any(np.sign(k) != np.sign(k[0])):
        raise SignChangeError(f"k changes sign on [{t0}, {t1}]; split the interval at its zero")
    mid = float(np.abs(traj.k(0.5 * (t0 + t1))))
    k1 = -np.asarray(traj.kpp(t), dtype=float) / (k * k)
    return SymmetryLineData(t, k, k1, np.abs(k) / mid)


@dataclass(frozen=True)
class ResidualReport:
    gauss_max: float
    codazzi_max: float
    conservation_max: float
    grid: int

    def worst(self) -> float:
        return max(self.gauss_max, self.codazzi_max, self.conservation_max)


def residuals(traj: CurvatureSource, grid: int = 64, transverse: Callable | None = None,
              k1_derivative: str = "auto") -> ResidualReport:
    """Maxima of the Gauss, Codazzi and conservation residuals.

    Evaluated on ``grid`` points of ``[2h, span - 2h]`` keeping those with
    ``|k| > 1e-3 max|k|``. The finite-difference step is
    ``h = min(span/(8 grid), 1/(64 max|k|))`` and every difference is
    Richardson-extrapolated.

    ``u''`` always comes from differencing ``u'``, so the Gauss residual
    measures how well the sampled ``k'`` and ``k''`` agree. ``k1'`` is
    differenced when ``k1_derivative="fd"``; with ``"analytic"`` it is
    ``-k'''/k^2 + 2 k' k''/k^3`` using the source's ``kppp``. Near small
    ``k`` with ``lam != 0`` we have ``k1 ~ -lam/k``, and no difference
    quotient reaches an absolute ``1e-7`` there, so ``"auto"`` picks the
    analytic form whenever ``kppp`` exists.

    ``u = |k|`` unless ``transverse`` supplies another (e.g. a wrong one, as
    a control); its derivatives are then differenced too. Never raises for a
    bad trajectory; large residuals are the report.
    """
    if grid < 8:
        raise UsageError(f"grid must be >= 8, got {grid}")
    if k1_derivative not in ("auto", "analytic", "fd"):
        raise UsageError(f"k1_derivative must be auto, analytic or fd, got {k1_derivative!r}")
    analytic = k1_derivative == "analytic" or (
        k1_derivative == "auto" and hasattr(traj, "kppp"))
    span = float(traj.span)
    probe = np.linspace(0.0, span, 8 * grid + 1)
    kmax = float(np.max(np.abs(traj.k(probe))))
    h = span / (8.0 * grid)
    if kmax > 0:
        h = min(h, 1.0 / (64.0 * kmax))
    t = np.linspace(2.0 * h, span - 2.0 * h, grid)
    k = np.asarray(traj.k(t), dtype=float)
    keep = np.abs(k) > REL_K_FLOOR * kmax
    if kmax == 0.0 or not np.any(keep):
        return ResidualReport(0.0, 0.0, 0.0, grid)
    t, k = t[keep], k[keep]
    kp = np.asarray(traj.kp(t), dtype=float)
    kpp = np.asarray(traj.kpp(t), dtype=float)
    k1 = -kpp / (k * k)
    if analytic:
        k1p = -np.asarray(traj.kppp(t), dtype=float) / (k * k) + 2.0 * kpp * kp / k**3
    else:
        k1p = central_difference(lambda s: -traj.kpp(s) / traj.k(s) ** 2, t, h)

    if transverse is None:
        s = np.sign(k)
        u = np.abs(k)
        up = s * kp
        upp = s * central_difference(traj.kp, t, h)
    else:
        u = np.asarray(transverse(t), dtype=float)
        up = central_difference(transverse, t, h)
        upp = central_difference(lambda x: central_difference(transverse, x, h), t, h)

    r_gauss = k * k1 + upp / u
    r_codazzi = k1p - (up / u) * (k - k1)
    r_cons = kp / k - up / u
    return ResidualReport(
        float(np.max(np.abs(r_gauss))),
        float(np.max(np.abs(r_codazzi))),
        float(np.max(np.abs(r_cons))),
        grid,
    )
