"""Self-check suite run by ``inflated validate``.

Each check measures one residual against a threshold. Thresholds are set
for the default tolerance ``1e-10`` and scale linearly with the requested
one. Reference constants are closed forms in the Beta function, evaluated
once at high precision and frozen here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .assembly import (
    ArcSpec,
    assemble_cross_section,
    build_arc,
    family_coordinate,
    pole_corner_angle,
    shoot_for_pole_angle,
)
from .curvegeom import (
    Pose,
    arclength_of_graph,
    closure_report,
    curvature_from_graph,
    reconstruct_from_curvature,
    total_turning,
)
from .errors import InflatedError
from .mylar import (
    flat_radius,
    mylar_thickness,
    mylar_volume,
    paulsen_height,
    paulsen_slope,
    verify_mylar_end_to_end,
)
from .numerics import Tolerances, central_difference
from .profile_ode import (
    ProfileParams,
    implicit_time_of_k,
    invert_implicit,
    ode_residual,
    params_from_state,
    rescale_solution,
    solve_ivp,
)
from .symmetry_system import perturbed, residuals

# (1/4) B(1/4, 1/2): flat radius of the unit balloon.
FLAT_RADIUS_UNIT = 1.31102877714605990523
# (1/2) B(3/4, 1/2): thickness of the unit balloon.
THICKNESS_UNIT = 1.19814023473559220744
# 2 pi (1/4) B(5/4, 1/2): volume of the unit balloon.
VOLUME_UNIT = 2.74581224995124800958

DEFAULT_SUITE_TOL = 1e-10

# (lam, mu) grid shared by the trajectory checks: mu spans the valid range
# mu > lam^2 for each lam.
TRAJECTORY_GRID = tuple(
    (lam, lam * lam + d) for lam in (-1.0, 0.0, 1.0, 3.0) for d in (0.1, 4.0, 16.0))


@dataclass(frozen=True)
class Check:
    name: str
    value: float
    threshold: float
    passed: bool
    mode: str = "max"  # "max": value <= threshold; "min": value > threshold

    def line(self) -> str:
        rel = "<=" if self.mode == "max" else ">"
        status = "PASS" if self.passed else "FAIL"
        return f"{status} {self.name}: {self.value:.3e} {rel} {self.threshold:.1e}"


def _primary(lam: float, mu: float, quarter_periods: float, tol: Tolerances):
    p = ProfileParams(lam, mu)
    T = implicit_time_of_k(p.turning_curvature(), p, tol)
    return p, T, solve_ivp(0.0, 0.5 * math.sqrt(mu - lam * lam), lam, quarter_periods * T, tol)


def _flat_radius_identity(tol):
    t = implicit_time_of_k(2.0, ProfileParams(0.0, 16.0), tol)
    return abs(t - FLAT_RADIUS_UNIT)


def _graph_arclength(tol):
    s = arclength_of_graph(lambda u, gap: paulsen_slope(u, 1.0, gap), 0.0, 1.0, tol,
                           singular_end="right", with_gap=True)
    return abs(s - implicit_time_of_k(2.0, ProfileParams(0.0, 16.0), tol))


def _thickness(tol):
    return abs(mylar_thickness(1.0, tol) - THICKNESS_UNIT)


def _volume(tol):
    return abs(mylar_volume(1.0, tol).value - VOLUME_UNIT)


def _volume_routes(tol):
    v = mylar_volume(1.0, tol)
    return abs(v.nested - v.swapped)


def _linear_curvature(tol):
    x = np.linspace(0.0, 0.95, 96)
    # f' is the integrand of the height quadrature; f'' is differenced.
    fpp = central_difference(lambda v: paulsen_slope(v, 1.0), x, 1e-4)
    k = curvature_from_graph(paulsen_slope(x, 1.0), fpp)
    return float(np.max(np.abs(k + 2.0 * x)))


def _height_slope(tol):
    # The quadrature heights, differenced, reproduce the slope.
    x = np.linspace(0.05, 0.9, 12)
    f = lambda v: np.array([paulsen_height(float(xi), 1.0, tol) for xi in v])  # noqa: E731
    return float(np.max(np.abs(central_difference(f, x, 1e-3) - paulsen_slope(x, 1.0))))


def _conservation(tol):
    worst = 0.0
    for lam, mu in TRAJECTORY_GRID:
        _, _, tr = _primary(lam, mu, 3.0, tol)
        s = tr.sample(257)
        q = s["k"] * s["kpp"] - s["kp"] ** 2 + 0.25 * s["k"] ** 4
        worst = max(worst, float(np.max(np.abs(q - q[0]))) / abs(q[0]))
    return worst


def _lambda_recovery(tol):
    worst = 0.0
    for lam, mu in TRAJECTORY_GRID:
        _, _, tr = _primary(lam, mu, 3.0, tol)
        kmax = tr.max_abs_k()
        for t in np.linspace(0.0, tr.span, 97):
            st = tr.state(float(t))
            if abs(st.k) > 1e-3 * max(kmax, 1.0) and abs(st.k) > 1e-6:
                worst = max(worst, abs(params_from_state(st).lam - lam))
    return worst


def _ode_residual_analytic(tol):
    worst = 0.0
    for lam, mu in TRAJECTORY_GRID:
        _, _, tr = _primary(lam, mu, 3.0, tol)
        for t in np.linspace(0.0, tr.span, 65):
            st = tr.state(float(t))
            worst = max(worst, abs(ode_residual(st, float(tr.kppp(t)))))
    return worst


def _ode_residual_fd(tol):
    worst = 0.0
    for lam, mu in TRAJECTORY_GRID:
        _, _, tr = _primary(lam, mu, 3.0, tol)
        h = min(tr.span / 512, 1.0 / (64.0 * tr.max_abs_k()))
        t = np.linspace(2 * h, tr.span - 2 * h, 65)
        kppp = central_difference(tr.kpp, t, h)
        r = [ode_residual(tr.state(float(ti)), float(v)) for ti, v in zip(t, kppp)]
        worst = max(worst, float(np.max(np.abs(r))))
    return worst


def _implicit_vs_ode(tol):
    worst = 0.0
    for lam, mu in TRAJECTORY_GRID[::2]:
        p, T, tr = _primary(lam, mu, 1.5, tol)
        for t in np.linspace(0.0, 1.5 * T, 9):
            worst = max(worst, abs(invert_implicit(float(t), p, tol) - float(tr.k(t))))
    return worst


def _scaling(tol):
    worst = 0.0
    for c in (0.5, 2.0, -1.5):
        base = solve_ivp(0.3, 0.7, 1.0, 2.0, tol)
        scaled = rescale_solution(base, c)
        fresh = solve_ivp(c * 0.3, c * abs(c) * 0.7, c * c * 1.0, scaled.span, tol)
        t = np.linspace(0.0, scaled.span, 65)
        worst = max(worst, float(np.max(np.abs(scaled.k(t) - fresh.k(t)))))
    return worst


def _symmetry(tol):
    worst = 0.0
    for lam, mu in TRAJECTORY_GRID:
        _, _, tr = _primary(lam, mu, 3.0, tol)
        worst = max(worst, residuals(tr, 64).worst())
    return worst


def _symmetry_control(tol):
    _, _, tr = _primary(0.0, 16.0, 1.0, tol)
    return residuals(perturbed(tr, 0.05), 64).gauss_max


def _circle(tol):
    arc = reconstruct_from_curvature(lambda t: 2.0, math.pi, Pose(), tol)
    return closure_report([arc], []).endpoint_gap


def _mylar_turning(tol):
    return abs(abs(total_turning(verify_mylar_end_to_end(1.0, tol).quarter_arc)) - 0.5 * math.pi)


def _mylar_closure(tol):
    return verify_mylar_end_to_end(1.0, tol).closure.endpoint_gap


def _mylar_gauss_bonnet(tol):
    return abs(verify_mylar_end_to_end(1.0, tol).closure.turning_plus_corners - 2 * math.pi)


def _mylar_profile(tol):
    return verify_mylar_end_to_end(1.0, tol).max_deviation


def _shoot_mylar(tol):
    L = flat_radius(1.0, tol)
    p = shoot_for_pole_angle(L, 0.0, tol)
    return abs(family_coordinate(p, L) - 2.0 * FLAT_RADIUS_UNIT)


def _shoot_round_trip(tol):
    worst = 0.0
    for target in (0.4, 1.5, 2.8):
        p = shoot_for_pole_angle(1.0, target, tol)
        _, arc = build_arc(ArcSpec(1.0, params=p), tol)
        p2 = shoot_for_pole_angle(1.0, pole_corner_angle(arc), tol)
        worst = max(worst, abs(family_coordinate(p2, 1.0) - family_coordinate(p, 1.0)))
    return worst


def _section_closure(tol):
    p = shoot_for_pole_angle(1.0, 0.3, tol, n_fold=4)
    _, arc = build_arc(ArcSpec(1.0, params=p), tol)
    return assemble_cross_section(arc, 4).closure.endpoint_gap


# (name, function, threshold at the default tolerance, mode, scales with tol)
CHECKS: tuple[tuple[str, Callable, float, str, bool], ...] = (
    ("flat radius = (1/4)B(1/4,1/2)", _flat_radius_identity, 1e-7, "max", True),
    ("graph arclength = implicit time", _graph_arclength, 1e-7, "max", True),
    ("thickness = (1/2)B(3/4,1/2)", _thickness, 1e-5, "max", True),
    ("volume = 2 pi (1/4)B(5/4,1/2)", _volume, 1e-4, "max", True),
    ("volume routes agree", _volume_routes, 1e-8, "max", True),
    ("curvature linear in x", _linear_curvature, 1e-7, "max", True),
    ("quadrature heights match slope", _height_slope, 1e-7, "max", True),
    ("Q conserved (relative drift)", _conservation, 1e-9, "max", True),
    ("lambda recovered from states", _lambda_recovery, 1e-7, "max", True),
    ("curvature equation, analytic k'''", _ode_residual_analytic, 1e-9, "max", True),
    ("curvature equation, differenced k'''", _ode_residual_fd, 1e-5, "max", True),
    ("implicit inversion = ODE", _implicit_vs_ode, 1e-8, "max", True),
    ("scaling invariance", _scaling, 1e-9, "max", True),
    ("Gauss/Codazzi/conservation residuals", _symmetry, 1e-7, "max", True),
    ("perturbed trajectory fails Gauss", _symmetry_control, 1e-2, "min", False),
    ("constant curvature closes", _circle, 1e-9, "max", True),
    ("mylar quarter turning = pi/2", _mylar_turning, 1e-7, "max", True),
    ("mylar section closes", _mylar_closure, 1e-6, "max", True),
    ("mylar turning + corners = 2 pi", _mylar_gauss_bonnet, 1e-6, "max", True),
    ("mylar ODE profile = graph", _mylar_profile, 1e-6, "max", True),
    ("shooting recovers mylar", _shoot_mylar, 1e-6, "max", True),
    ("shooting round trip", _shoot_round_trip, 1e-8, "max", True),
    ("cube section closes", _section_closure, 1e-6, "max", True),
)


def run_suite(tol: float = DEFAULT_SUITE_TOL, inject_fault: bool = False,
              report: Callable[[str], None] | None = None) -> list[Check]:
    """Run every check; ``report`` receives one line per check as it finishes.

    ``inject_fault`` corrupts the first measurement so the suite must fail.
    """
    tols = Tolerances(tol, tol)
    factor = tol / DEFAULT_SUITE_TOL
    results = []
    for i, (name, fn, threshold, mode, scales) in enumerate(CHECKS):
        limit = threshold * factor if scales else threshold
        try:
            value = float(fn(tols))
        except InflatedError as exc:
            value = math.inf if mode == "max" else 0.0
            name = f"{name} ({type(exc).__name__})"
        if inject_fault and i == 0:
            value += 1.0
        ok = value <= limit if mode == "max" else value > limit
        check = Check(name, value, limit, bool(ok), mode)
        results.append(check)
        if report is not None:
            report(check.line())
    return results
