"""The mylar balloon: Paulsen's profile and its cross-check against the ODE.

The upper-right quarter of the profile of a balloon of inflated radius
``a`` is the graph of

    f(x) = int_x^a u^2 / sqrt(a^4 - u^4) du,   0 <= x <= a,

whose curvature is the linear function ``-2x/a^2``. In arclength this is
the family member ``lam = 0, mu = 16/a^4`` of the profile equation, with
``k = 0`` at the pole and ``k' = 0`` at the equator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .assembly import CrossSection, assemble_cross_section
from .curvegeom import ClosureReport, PlanarCurve, Pose, arclength_of_graph, reconstruct_from_curvature
from .errors import DomainError, InflatedError
from .numerics import DEFAULT_TOL, Tolerances, integrate_singular_endpoint
from .profile_ode import ProfileParams, Trajectory, rescale_solution, solve_ivp


def _check_radius(a: float) -> None:
    if not (a > 0 and math.isfinite(a)):
        raise DomainError(f"balloon radius must be positive and finite, got {a}")


def _quad_tol(tol: Tolerances) -> Tolerances:
    return Tolerances(min(tol.abs_tol, 1e-13), min(tol.rel_tol, 1e-13), tol.max_steps)


def paulsen_slope(x, a: float, gap=None):
    """``f'(x) = -x^2/sqrt(a^4 - x^4)``; pass ``gap = a - x`` for precision near ``a``."""
    x = np.asarray(x, dtype=float)
    g = a - x if gap is None else np.asarray(gap, dtype=float)
    return -x * x / np.sqrt(g * (a + x) * (a * a + x * x))


def paulsen_height(x: float, a: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Height ``f(x)`` of the quarter profile above the equatorial plane."""
    _check_radius(a)
    if not 0.0 <= x <= a:
        raise DomainError(f"x={x} outside [0, a={a}]")
    if x == a:
        return 0.0

    def integrand(u, gap):
        return u * u / np.sqrt(gap * (a + u) * (a * a + u * u))

    return integrate_singular_endpoint(integrand, x, a, "right", _quad_tol(tol), with_gap=True).value


def paulsen_arclength(x: float, a: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Arclength from the pole to abscissa ``x``: ``int_0^x a^2/sqrt(a^4-u^4) du``."""
    _check_radius(a)
    if not 0.0 <= x <= a:
        raise DomainError(f"x={x} outside [0, a={a}]")
    if x == a:
        return flat_radius(a, tol)
    return arclength_of_graph(lambda u, gap: paulsen_slope(u, a, a - u),
                              0.0, x, _quad_tol(tol), singular_end="right", with_gap=True)


def linear_curvature(x, a: float):
    """Curvature of the profile as a function of ``x``: ``-2x/a^2``."""
    return -2.0 * np.asarray(x, dtype=float) / (a * a)


def flat_radius(a: float, tol: Tolerances = DEFAULT_TOL) -> float:
    """Radius ``r`` of the flat disk: the pole-to-equator arclength, ``a * 1.31102877...``."""
    _check_radius(a)

    def integrand(v, gap):
        return 1.0 / np.sqrt(gap * (1.0 + v) * (1.0 + v * v))

    unit = integrate_singular_endpoint(integrand, 0.0, 1.0, "right", _quad_tol(tol), with_gap=True)
    return a * unit.value


def mylar_thickness(a: float, tol: Tolerances = DEFAULT_TOL) -> float:
    return 2.0 * paulsen_height(0.0, a, tol)


@dataclass(frozen=True)
class MylarVolume:
    value: float
    nested: float
    swapped: float


def mylar_volume(a: float, tol: Tolerances = DEFAULT_TOL) -> MylarVolume:
    """Enclosed volume ``4 pi int_0^a x f(x) dx`` computed two ways.

    ``nested`` integrates ``x f(x)`` with ``f`` itself from quadrature;
    ``swapped`` uses the order-exchanged form
    ``2 pi int_0^a u^4 / sqrt(a^4 - u^4) du``.

    Raises:
        InflatedError: the two routes disagree by more than ``10*tol``.
    """
    if a == 0:
        return MylarVolume(0.0, 0.0, 0.0)
    _check_radius(a)
    qtol = _quad_tol(tol)

    def outer(x):
        x = np.atleast_1d(x)
        return np.array([xi * paulsen_height(float(xi), a, qtol) for xi in x])

    # x f(x) ~ sqrt(a - x) at the equator; the right-end substitution smooths it.
    nested = 4.0 * math.pi * integrate_singular_endpoint(outer, 0.0, a, "right", tol).value

    def swapped_integrand(u, gap):
        return u**4 / np.sqrt(gap * (a + u) * (a * a + u * u))

    swapped = 2.0 * math.pi * integrate_singular_endpoint(
        swapped_integrand, 0.0, a, "right", qtol, with_gap=True).value
    limit = 10.0 * max(tol.abs_tol, tol.rel_tol * abs(swapped))
    if abs(nested - swapped) > limit:
        raise InflatedError(
            f"volume routes disagree: nested={nested!r}, swapped={swapped!r}")
    return MylarVolume(swapped, nested, swapped)


def mylar_family_params(a: float) -> ProfileParams:
    _check_radius(a)
    return ProfileParams(0.0, 16.0 / a**4)


@dataclass(frozen=True)
class MylarProfile:
    a: float
    x: np.ndarray
    f: np.ndarray


def mylar_profile(a: float, n: int = 64, tol: Tolerances = DEFAULT_TOL) -> MylarProfile:
    """Paulsen graph sampled on ``x = a sin(pi/2 * i/(n-1))``, clustered toward ``x = a``."""
    _check_radius(a)
    if n < 2:
        raise DomainError("need at least 2 samples")
    x = a * np.sin(0.5 * math.pi * np.linspace(0.0, 1.0, n))
    x[-1] = a
    f = np.array([paulsen_height(float(xi), a, tol) for xi in x])
    return MylarProfile(a, x, f)


@dataclass(frozen=True)
class MylarReport:
    """Derived quantities of a balloon of radius ``a`` (curvatures as magnitudes)."""

    a: float
    flat_radius: float
    thickness: float
    volume: float
    equator_k: float
    pole_kp: float


def mylar_report(a: float, tol: Tolerances = DEFAULT_TOL) -> MylarReport:
    return MylarReport(
        a=a,
        flat_radius=flat_radius(a, tol),
        thickness=mylar_thickness(a, tol),
        volume=mylar_volume(a, tol).value,
        equator_k=2.0 / a,
        pole_kp=2.0 / a**2,
    )


@dataclass(frozen=True)
class MylarVerification:
    """Outcome of the ODE-versus-Paulsen comparison.

    ``passed`` is False when a bound is exceeded; the comparison never
    raises for a mismatch.
    """

    a: float
    params: ProfileParams
    max_deviation: float
    equator_kp: float
    closure: ClosureReport
    passed: bool
    trajectory: Trajectory = field(repr=False)
    quarter_arc: PlanarCurve = field(repr=False)
    section: CrossSection | None = field(default=None, repr=False)
    messages: tuple[str, ...] = ()


def verify_mylar_end_to_end(
    a: float,
    tol: Tolerances = DEFAULT_TOL,
    mu: float | None = None,
    n_compare: int = 64,
    deviation_bound: float = 1e-6,
    kp_bound: float = 1e-7,
) -> MylarVerification:
    """Rebuild the quarter profile from the ODE and compare it with Paulsen's graph.

    The curvature is integrated from the pole (``k = 0``) over the flat
    radius, turned into a planar curve starting at ``(0, f(0))`` with a
    horizontal tangent, and compared pointwise with the graph samples placed
    at their own arclength. ``mu`` overrides the family constant for
    negative controls. Bounds scale with ``a``.
    """
    _check_radius(a)
    params = mylar_family_params(a)
    if mu is not None:
        params = ProfileParams(params.lam, mu)
    L = flat_radius(a, tol)
    primary = solve_ivp(0.0, 0.5 * math.sqrt(params.mu - params.lam**2), params.lam, L, tol)
    traj = rescale_solution(primary, -1.0)

    profile = mylar_profile(a, n_compare, tol)
    pole = Pose(0.0, float(profile.f[0]), 0.0)
    arc = reconstruct_from_curvature(traj.k, L, pole, tol)

    t_graph = np.array([paulsen_arclength(float(xi), a, tol) for xi in profile.x])
    t_graph = np.clip(t_graph, 0.0, L)
    xs, ys, _ = arc.at(t_graph)
    deviation = float(np.max(np.hypot(xs - profile.x, ys - profile.f)))
    equator_kp = float(traj.kp(L))

    section = assemble_cross_section(arc.reversed(), 2)
    messages = []
    if deviation > deviation_bound * a:
        messages.append(f"max deviation {deviation:.3e} exceeds {deviation_bound * a:.1e}")
    if abs(equator_kp) > kp_bound / a**2:
        messages.append(f"|k'(L)| = {abs(equator_kp):.3e} exceeds {kp_bound / a**2:.1e}")
    return MylarVerification(
        a=a,
        params=params,
        max_deviation=deviation,
        equator_kp=equator_kp,
        closure=section.closure,
        passed=not messages,
        trajectory=traj,
        quarter_arc=arc,
        section=section,
        messages=tuple(messages),
    )
