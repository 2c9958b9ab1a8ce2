"""Symmetry-plane cross-sections built from congruent profile arcs.

A quarter arc runs from an equator point (where ``k' = 0``, tangent
vertical) to a pole. Reflecting it across the normal line at the equator
gives a half-profile from pole to pole; ``n`` rotated copies of the
half-profile, joined at the poles, close up into a section with ``n``-fold
rotational symmetry (``n = 2``: pillows and doubled polygons, ``n = 4``:
the cube). Each joint is a corner whose exterior angle is
``2 pi/n - 2 * (turning of the quarter arc)``.

Family coordinate: arcs are normalised by their equator curvature, so a
member is fixed by ``nu = k_eq * L`` and the shape constant
``lam_hat = lam / k_eq^2``. ``lam_hat = 0`` is the slice through the mylar
balloon, whose quarter arc has ``nu = 2 * 1.31102877...`` and a smooth pole.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .curvegeom import (
    ClosureReport,
    PlanarCurve,
    Pose,
    closure_report,
    reconstruct_from_curvature,
    total_turning,
    wrap_angle,
)
from .errors import (
    DegenerateArcError,
    InflatedError,
    NoEquatorError,
    NoSolutionError,
    UsageError,
)
from .numerics import (
    DEFAULT_TOL,
    Tolerances,
    find_root_bracketed,
    integrate_adaptive,
    integrate_ode,
)
from .profile_ode import (
    LOCAL_TOL_FACTOR,
    ProfileParams,
    Trajectory,
    implicit_time_of_k,
    solve_ivp,
)

EQUATOR_KP_ZERO = "equator_kp_zero"
POLE_K_ZERO = "pole_k_zero"
MIN_ARC_LENGTH = 1e-9


def equator_curvature(p: ProfileParams) -> float:
    """Curvature where ``k' = 0``: ``sqrt(2 lam + sqrt(3 lam^2 + mu))``.

    Raises:
        NoEquatorError: the radicand has no positive root.
    """
    k = p.turning_curvature()
    if k is None:
        raise NoEquatorError(f"no positive root of the radicand for lam={p.lam}, mu={p.mu}")
    return k


def family_params(nu: float, L: float, lam_hat: float = 0.0) -> ProfileParams:
    """Dimensional ``(lam, mu)`` of the arc with coordinate ``nu`` and length ``L``."""
    if not (nu > 0 and L > 0):
        raise UsageError(f"nu and L must be positive, got nu={nu}, L={L}")
    k_eq = nu / L
    lam = lam_hat * k_eq**2
    return ProfileParams(lam, lam**2 - 4.0 * lam * k_eq**2 + k_eq**4)


def family_coordinate(p: ProfileParams, L: float) -> float:
    return equator_curvature(p) * L


def _unit_params(lam_hat: float) -> ProfileParams:
    # Equator curvature 1: R(1) = 0.
    return ProfileParams(lam_hat, lam_hat**2 - 4.0 * lam_hat + 1.0)


@dataclass(frozen=True)
class ArcSpec:
    """Description of a quarter arc.

    Exactly one of ``params`` and ``pole_curvature`` is set. The pole
    curvature parameterisation selects a member of the ``lam_hat`` slice.
    """

    L: float
    params: ProfileParams | None = None
    pole_curvature: float | None = None
    boundary: str = EQUATOR_KP_ZERO
    lam_hat: float = 0.0

    def __post_init__(self) -> None:
        if not self.L > 0:
            raise UsageError(f"arc length must be positive, got {self.L}")
        if (self.params is None) == (self.pole_curvature is None):
            raise UsageError("set exactly one of params and pole_curvature")
        if self.boundary not in (EQUATOR_KP_ZERO, POLE_K_ZERO):
            raise UsageError(f"unknown boundary condition {self.boundary!r}")
        if self.boundary == POLE_K_ZERO and self.params is None:
            raise UsageError("pole_k_zero arcs need explicit params")


def build_arc(spec: ArcSpec, tol: Tolerances = DEFAULT_TOL) -> tuple[Trajectory, PlanarCurve]:
    """Curvature trajectory and planar arc for ``spec``.

    ``equator_kp_zero``: starts at the equator ``(k_eq, 0)``, heading
    north from the origin, and runs ``L`` toward the pole.
    ``pole_k_zero``: starts at the pole with ``k = 0``, ``k' > 0``, heading
    west, on the primary branch.

    Raises:
        DegenerateArcError: a pole start with ``mu <= lam^2`` (only the
            trivial solution passes through zero curvature there).
    """
    params = spec.params
    if params is None:
        nu = shoot_nu_for_pole_curvature(spec.L, spec.pole_curvature, spec.lam_hat, tol)
        params = family_params(nu, spec.L, spec.lam_hat)
    if spec.boundary == EQUATOR_KP_ZERO:
        k_eq = equator_curvature(params)
        traj = solve_ivp(k_eq, 0.0, params.lam, spec.L, tol)
        pose = Pose(0.0, 0.0, 0.5 * math.pi)
    else:
        r0 = params.mu - params.lam**2
        if r0 <= 0:
            raise DegenerateArcError(
                f"mu - lam^2 = {r0:.3g} <= 0: the solution through k = 0 is k = 0")
        traj = solve_ivp(0.0, 0.5 * math.sqrt(r0), params.lam, spec.L, tol)
        pose = Pose(0.0, 0.0, math.pi)
    curve = reconstruct_from_curvature(traj.k, spec.L, pose, tol)
    return traj, curve


def pole_corner_angle(arc: PlanarCurve, n_fold: int = 2) -> float:
    """Exterior angle where the half-profile meets its rotated copy.

    ``2 pi / n_fold - 2 * turning(arc)``: zero for a smooth pole (mylar),
    ``pi`` for a straight segment with ``n_fold = 2``.
    """
    if n_fold < 2:
        raise UsageError(f"n_fold must be >= 2, got {n_fold}")
    return 2.0 * math.pi / n_fold - 2.0 * total_turning(arc)


@dataclass(frozen=True)
class CrossSection:
    """Closed section made of ``n_arcs`` half-profiles joined at the poles.

    Coordinates are centred on the symmetry centre.
    """

    arcs: tuple[PlanarCurve, ...]
    corner_exterior_angles: tuple[float, ...]
    closure: ClosureReport
    ok: bool = True
    message: str = ""
    area: float | None = None

    @property
    def n_arcs(self) -> int:
        return len(self.arcs)

    def points(self) -> np.ndarray:
        return np.concatenate([np.column_stack([a.x, a.y]) for a in self.arcs])

    def metrics(self) -> dict[str, float]:
        pts = self.points()
        x, y = pts[:, 0], pts[:, 1]
        return {
            "width": float(x.max() - x.min()),
            "height": float(y.max() - y.min()),
            "area": self.area if self.area is not None
            else math.fsum(_hermite_area(a) for a in self.arcs),
            "perimeter": math.fsum(a.length for a in self.arcs),
        }


_GAUSS3 = np.polynomial.legendre.leggauss(3)


def _hermite_area(curve: PlanarCurve) -> float:
    """``(1/2) int (x y' - y x') dt`` along ``curve``.

    Each sample interval is the cubic Hermite curve through its end points
    with the sampled unit tangents; the integrand is then a quintic and
    three-point Gauss is exact, so the error is that of the Hermite
    interpolant rather than of the chord polygon.
    """
    h = np.diff(curve.t)
    p0 = np.column_stack([curve.x[:-1], curve.y[:-1]])
    p1 = np.column_stack([curve.x[1:], curve.y[1:]])
    m0 = h[:, None] * np.column_stack([np.cos(curve.theta[:-1]), np.sin(curve.theta[:-1])])
    m1 = h[:, None] * np.column_stack([np.cos(curve.theta[1:]), np.sin(curve.theta[1:])])
    nodes, weights = _GAUSS3
    total = 0.0
    for xi, w in zip(nodes, weights):
        s = 0.5 * (xi + 1.0)
        h00, h10, h01, h11 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s, -2 * s**3 + 3 * s**2, s**3 - s**2
        d00, d10, d01, d11 = 6 * s**2 - 6 * s, 3 * s**2 - 4 * s + 1, -6 * s**2 + 6 * s, 3 * s**2 - 2 * s
        pt = h00 * p0 + h10 * m0 + h01 * p1 + h11 * m1
        dp = d00 * p0 + d10 * m0 + d01 * p1 + d11 * m1
        total += 0.5 * w * 0.5 * float(np.sum(pt[:, 0] * dp[:, 1] - pt[:, 1] * dp[:, 0]))
    return total


def _sector_area(arc: PlanarCurve, origin: np.ndarray) -> float:
    """``(1/2) int ((x - ox) y' - (y - oy) x') dt`` from the dense solution of ``arc``."""

    def integrand(t):
        x, y, th = arc.at(np.atleast_1d(t))
        return 0.5 * ((x - origin[0]) * np.sin(th) - (y - origin[1]) * np.cos(th))

    return integrate_adaptive(integrand, float(arc.t[0]), float(arc.t[-1]),
                              Tolerances(1e-13, 1e-13)).value


def _concat(first: PlanarCurve, second: PlanarCurve) -> PlanarCurve:
    tail = second.shifted_arclength(first.t[-1])
    return PlanarCurve(
        np.concatenate([first.t, tail.t[1:]]),
        np.concatenate([first.x, tail.x[1:]]),
        np.concatenate([first.y, tail.y[1:]]),
        np.concatenate([first.theta, tail.theta[1:]]),
    )


def _upright(arc: PlanarCurve) -> PlanarCurve:
    # Rotate about the start so the equator tangent points north.
    rot = 0.5 * math.pi - float(arc.theta[0])
    if rot == 0.0:
        return arc
    x0, y0 = float(arc.x[0]), float(arc.y[0])
    c, s = math.cos(rot), math.sin(rot)
    return arc.transformed(rot, (x0 - (c * x0 - s * y0), y0 - (s * x0 + c * y0)))


def half_profile(arc: PlanarCurve) -> PlanarCurve:
    """Quarter arc plus its mirror image across the normal line at the equator.

    The arc is first rotated about its start so the equator tangent points
    north; the result runs pole -> equator -> pole.
    """
    arc = _upright(arc)
    ey = float(arc.y[0])
    mirror = arc.transformed(reflect_x=True, shift=(0.0, 2.0 * ey))
    lower = mirror.reversed()
    # Tie the mirrored endpoint to the exact equator sample.
    return _concat(lower, arc)


def assemble_cross_section(arc: PlanarCurve, n_arcs: int = 2) -> CrossSection:
    """Close a section from ``n_arcs`` rotated copies of the half-profile of ``arc``.

    ``arc`` is a quarter arc starting at the equator. Corners are measured
    from the sampled tangents; closure is reported, never forced.
    """
    if n_arcs < 2:
        raise UsageError(f"need at least 2 arcs, got {n_arcs}")
    half = half_profile(arc)
    v_start, v_end = half.start, half.end
    chord = v_end - v_start
    c = float(np.hypot(*chord))
    if c <= 1e-12 * max(half.length, 1e-300):
        raise DegenerateArcError("pole lies on the equator line; the half-profile is closed")
    alpha = 2.0 * math.pi / n_arcs
    left = np.array([-chord[1], chord[0]]) / c
    d = 0.0 if n_arcs == 2 else 0.5 * c / math.tan(0.5 * alpha)
    centre = 0.5 * (v_start + v_end) + d * left

    copies = []
    for j in range(n_arcs):
        a = j * alpha
        ca, sa = math.cos(a), math.sin(a)
        rc = np.array([ca * centre[0] - sa * centre[1], sa * centre[0] + ca * centre[1]])
        copies.append(half.transformed(a, tuple(centre - rc - centre)))
    corners = tuple(
        wrap_angle(float(copies[(j + 1) % n_arcs].theta[0] - copies[j].theta[-1]))
        for j in range(n_arcs))
    closure = closure_report(copies, corners)
    area = None
    if arc.dense is not None:
        # Rigid motions and the mirror-plus-reversal preserve the signed area
        # swept about the centre, so every quarter contributes the same.
        rot = 0.5 * math.pi - float(arc.theta[0])
        x0, y0 = float(arc.x[0]), float(arc.y[0])
        c, s = math.cos(rot), math.sin(rot)
        dx, dy = centre[0] - x0, centre[1] - y0
        origin = np.array([x0 + c * dx + s * dy, y0 - s * dx + c * dy])
        area = 2 * n_arcs * _sector_area(arc, origin)
    diameter = float(np.ptp(np.concatenate([cp.x for cp in copies])))
    ok, message = True, ""
    if closure.endpoint_gap > 1e-3 * max(diameter, 1e-300):
        ok, message = False, f"closure gap {closure.endpoint_gap:.3e} exceeds 1e-3 of the diameter"
    return CrossSection(tuple(copies), corners, closure, ok, message, area)


# -- shooting over the family coordinate ---------------------------------


def _unit_arc_state(nu: float, lam_hat: float, tol: Tolerances) -> tuple[float, float, float]:
    """``(k, k', turning)`` after normalised arclength ``nu`` from the equator."""
    if nu == 0:
        return 1.0, 0.0, 0.0

    def fld(_t, y):
        return np.array([y[1], lam_hat * y[0] - 0.5 * y[0] ** 3, y[0]])

    dense = integrate_ode(fld, [1.0, 0.0, 0.0], 0.0, nu, tol.scaled(LOCAL_TOL_FACTOR))
    k, kp, turn = dense.y[-1]
    return float(k), float(kp), float(turn)


def _branch_end(lam_hat: float, n_fold: int, tol: Tolerances) -> float:
    """Largest ``nu`` on the monotone branch (pole curvature still >= 0)."""
    if lam_hat < 0.25:
        return implicit_time_of_k(1.0, _unit_params(lam_hat), tol)
    # k never reaches zero: stop where the corner closes (turning = pi/n).
    target_turn = math.pi / n_fold
    hi = 1.0
    while _unit_arc_state(hi, lam_hat, tol)[2] < target_turn:
        hi *= 2.0
        if hi > 1e4:
            raise DegenerateArcError(f"turning does not reach pi/{n_fold} for lam_hat={lam_hat}")
    f = lambda nu: _unit_arc_state(nu, lam_hat, tol)[2] - target_turn  # noqa: E731
    return find_root_bracketed(f, 0.0, hi, Tolerances(1e-14, tol.rel_tol, 200))


def corner_angle_of_nu(nu: float, n_fold: int = 2, lam_hat: float = 0.0,
                       tol: Tolerances = DEFAULT_TOL) -> float:
    """Pole exterior angle of the normalised arc with coordinate ``nu``."""
    return 2.0 * math.pi / n_fold - 2.0 * _unit_arc_state(nu, lam_hat, tol)[2]


def _check_length(L: float) -> None:
    if not L > 0:
        raise UsageError(f"L must be positive, got {L}")
    if L < MIN_ARC_LENGTH:
        raise DegenerateArcError(
            f"arc length {L:g} below {MIN_ARC_LENGTH:g}: no turning available at finite curvature")


def shoot_nu(L: float, target_angle: float, tol: Tolerances = DEFAULT_TOL,
             n_fold: int = 2, lam_hat: float = 0.0) -> float:
    """Family coordinate whose arc meets its mirror at ``target_angle``.

    Searched on the branch ``0 < nu <= nu_end`` where the pole curvature is
    non-negative; the corner angle decreases monotonically there, from
    ``2 pi/n_fold`` at ``nu -> 0``, so the solution is unique.

    Raises:
        NoSolutionError: target outside the achievable range, reported in
            ``achievable``.
    """
    _check_length(L)
    top = 2.0 * math.pi / n_fold
    nu_end = _branch_end(lam_hat, n_fold, tol)
    angle_end = corner_angle_of_nu(nu_end, n_fold, lam_hat, tol)
    if not (0.0 <= target_angle < top):
        raise NoSolutionError(
            f"target angle {target_angle} outside [0, {top})", (max(angle_end, 0.0), top))
    slack = 10.0 * max(tol.abs_tol, tol.rel_tol)
    if target_angle < angle_end - slack:
        raise NoSolutionError(
            f"target angle {target_angle:.6g} below the smallest achievable {angle_end:.6g}",
            (angle_end, top))
    if abs(target_angle - angle_end) <= slack:
        return nu_end
    f = lambda nu: corner_angle_of_nu(nu, n_fold, lam_hat, tol) - target_angle  # noqa: E731
    return find_root_bracketed(f, 0.0, nu_end, Tolerances(1e-14, tol.rel_tol, 200))


def shoot_for_pole_angle(L: float, target_angle: float, tol: Tolerances = DEFAULT_TOL,
                         n_fold: int = 2, lam_hat: float = 0.0) -> ProfileParams:
    """Family member of arc length ``L`` whose pole corner is ``target_angle``.

    The shape is found in normalised form and dilated so the arc length is
    exactly ``L``.
    """
    return family_params(shoot_nu(L, target_angle, tol, n_fold, lam_hat), L, lam_hat)


def shoot_nu_for_pole_curvature(L: float, kappa: float, lam_hat: float = 0.0,
                                tol: Tolerances = DEFAULT_TOL) -> float:
    """Family coordinate whose arc of length ``L`` ends with curvature ``kappa``.

    The dimensional pole curvature ``nu * k_hat(nu) / L`` rises from 0 and
    falls back to 0 at the branch end; the root on the falling side (the
    side containing the mylar arc) is returned.
    """
    _check_length(L)
    if lam_hat >= 0.25:
        raise DegenerateArcError("pole curvature parameterisation needs lam_hat < 1/4")
    nu_end = _branch_end(lam_hat, 2, tol)
    if kappa == 0.0:
        return nu_end

    def slope(nu):
        k, kp, _ = _unit_arc_state(nu, lam_hat, tol)
        return k + nu * kp

    rtol = Tolerances(1e-14, tol.rel_tol, 200)
    nu_peak = find_root_bracketed(slope, 1e-12, nu_end, rtol)
    k_peak = nu_peak * _unit_arc_state(nu_peak, lam_hat, tol)[0] / L
    if not 0.0 <= kappa <= k_peak:
        raise NoSolutionError(
            f"pole curvature {kappa:.6g} outside achievable [0, {k_peak:.6g}]", (0.0, k_peak))
    f = lambda nu: nu * _unit_arc_state(nu, lam_hat, tol)[0] / L - kappa  # noqa: E731
    return find_root_bracketed(f, nu_peak, nu_end, rtol)


# -- sweeps ---------------------------------------------------------------


@dataclass(frozen=True)
class SweepRow:
    index: int
    nu: float
    pole_angle: float = math.nan
    pole_curvature: float = math.nan
    width: float = math.nan
    height: float = math.nan
    area: float = math.nan
    closure_gap: float = math.nan
    turning_plus_corners: float = math.nan
    status: str = "ok"
    params: ProfileParams | None = field(default=None, compare=False)


def _sweep_point(index: int, nu: float, L: float, n_fold: int, lam_hat: float,
                 tol: Tolerances) -> SweepRow:
    try:
        params = family_params(nu, L, lam_hat)
        traj, arc = build_arc(ArcSpec(L, params=params), tol)
        section = assemble_cross_section(arc, n_fold)
        m = section.metrics()
        return SweepRow(
            index, nu,
            pole_angle=pole_corner_angle(arc, n_fold),
            pole_curvature=float(traj.k(L)),
            width=m["width"], height=m["height"], area=m["area"],
            closure_gap=section.closure.endpoint_gap,
            turning_plus_corners=section.closure.turning_plus_corners,
            status="ok" if section.ok else section.message,
            params=params,
        )
    except InflatedError as exc:
        return SweepRow(index, nu, status=f"{type(exc).__name__}: {exc}")


def sweep_family(nu_grid: Sequence[float], L: float, n_fold: int = 2, lam_hat: float = 0.0,
                 tol: Tolerances = DEFAULT_TOL, workers: int = 1) -> list[SweepRow]:
    """Pole data and section metrics for each ``nu`` in the grid.

    Per-point failures are recorded in ``status``. Rows come back in grid
    order whatever ``workers`` is.
    """
    if len(nu_grid) == 0:
        raise UsageError("sweep grid is empty")
    _check_length(L)
    args = [(i, float(nu), L, n_fold, lam_hat, tol) for i, nu in enumerate(nu_grid)]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            rows = list(pool.map(lambda a: _sweep_point(*a), args))
    else:
        rows = [_sweep_point(*a) for a in args]
    return sorted(rows, key=lambda r: r.index)
