import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from inflated.assembly import (
    POLE_K_ZERO,
    ArcSpec,
    assemble_cross_section,
    build_arc,
    corner_angle_of_nu,
    equator_curvature,
    family_coordinate,
    family_params,
    half_profile,
    pole_corner_angle,
    shoot_for_pole_angle,
    shoot_nu,
    shoot_nu_for_pole_curvature,
    sweep_family,
)
from inflated.curvegeom import reconstruct_from_curvature, total_turning
from inflated.errors import (
    DegenerateArcError,
    NoEquatorError,
    NoSolutionError,
    UsageError,
)
from inflated.mylar import flat_radius
from inflated.profile_ode import ProfileParams

MYLAR = ProfileParams(0.0, 16.0)
NU_MYLAR = 2.0 * oracles.FLAT_RADIUS_UNIT
L1 = oracles.FLAT_RADIUS_UNIT


class TestFamily:
    @pytest.mark.parametrize("lam,mu,k", [(0.0, 16.0, 2.0), (0.0, 1.0, 1.0),
                                          (3.0, -11.0, math.sqrt(10.0))])
    def test_equator_curvature(self, lam, mu, k):
        p = ProfileParams(lam, mu)
        assert equator_curvature(p) == pytest.approx(k, rel=1e-15)
        assert abs(p.radicand(k)) < 1e-12

    def test_no_equator(self):
        with pytest.raises(NoEquatorError):
            equator_curvature(ProfileParams(-1.0, -5.0))

    def test_mylar_coordinate(self):
        assert family_coordinate(MYLAR, L1) == pytest.approx(NU_MYLAR, abs=1e-14)
        p = family_params(NU_MYLAR, L1)
        assert p.lam == 0.0 and p.mu == pytest.approx(16.0, rel=1e-14)

    @settings(max_examples=40)
    @given(st.floats(0.1, 5.0), st.floats(0.1, 5.0), st.floats(-2.0, 0.2))
    def test_coordinate_round_trip(self, nu, L, lam_hat):
        p = family_params(nu, L, lam_hat)
        assert family_coordinate(p, L) == pytest.approx(nu, rel=1e-10)

    @pytest.mark.parametrize("lam_hat", sorted(oracles.BRANCH_END))
    def test_branch_end_is_smooth_pole(self, lam_hat):
        nu = shoot_nu_for_pole_curvature(1.0, 0.0, lam_hat)
        assert nu == pytest.approx(oracles.BRANCH_END[lam_hat], abs=1e-11)


class TestBuildArc:
    def test_mylar_smooth_pole(self):
        traj, arc = build_arc(ArcSpec(flat_radius(1.0), params=MYLAR))
        assert abs(float(traj.k(traj.span))) < 1e-7
        assert arc.theta[-1] == pytest.approx(math.pi, abs=1e-7)
        assert arc.length == pytest.approx(L1, abs=1e-15)

    def test_constant_curvature_half_circle(self):
        # lam_hat = 1/2 with k_eq = 1 is the constant solution k = 1.
        p = family_params(math.pi, math.pi, 0.5)
        traj, arc = build_arc(ArcSpec(math.pi, params=p))
        assert np.all(np.abs(traj.sample(17)["k"] - 1.0) < 1e-12)
        assert arc.end == pytest.approx([-2.0, 0.0], abs=1e-9)
        assert total_turning(arc) == pytest.approx(math.pi, abs=1e-12)

    def test_short_mylar_has_corner(self):
        traj, arc = build_arc(ArcSpec(0.5 * L1, params=MYLAR))
        assert abs(float(traj.k(traj.span))) > 0.5
        assert pole_corner_angle(arc) > 0.1

    def test_pole_start(self):
        traj, arc = build_arc(ArcSpec(L1, params=MYLAR, boundary=POLE_K_ZERO))
        assert float(traj.k(0.0)) == 0.0
        assert abs(float(traj.kp(L1))) < 1e-7

    def test_pole_start_degenerate(self):
        with pytest.raises(DegenerateArcError):
            build_arc(ArcSpec(1.0, params=ProfileParams(1.0, 1.0), boundary=POLE_K_ZERO))

    def test_pole_curvature_parameterisation(self):
        traj, _ = build_arc(ArcSpec(1.0, pole_curvature=0.3))
        assert float(traj.k(1.0)) == pytest.approx(0.3, abs=1e-9)
        assert abs(float(traj.kp(0.0))) == 0.0

    def test_arc_description_validation(self):
        with pytest.raises(UsageError):
            ArcSpec(0.0, params=MYLAR)
        with pytest.raises(UsageError):
            ArcSpec(1.0)
        with pytest.raises(UsageError):
            ArcSpec(1.0, params=MYLAR, pole_curvature=0.0)
        with pytest.raises(UsageError):
            ArcSpec(1.0, params=MYLAR, boundary="free")

    @settings(max_examples=10, deadline=None)
    @given(st.floats(0.3, 3.0), st.floats(0.2, 2.6))
    def test_length_preserved(self, L, nu):
        _, arc = build_arc(ArcSpec(L, params=family_params(nu, L)))
        assert arc.length == pytest.approx(L, abs=1e-14)


class TestCorners:
    def test_mylar(self):
        _, arc = build_arc(ArcSpec(L1, params=MYLAR))
        assert pole_corner_angle(arc) == pytest.approx(0.0, abs=1e-7)

    def test_straight_segment(self):
        arc = reconstruct_from_curvature(lambda t: 0.0, 1.0)
        assert pole_corner_angle(arc) == math.pi

    def test_quarter_circle(self):
        arc = reconstruct_from_curvature(lambda t: 1.0, 0.5 * math.pi)
        assert pole_corner_angle(arc) == pytest.approx(0.0, abs=1e-12)

    def test_bad_fold(self):
        with pytest.raises(UsageError):
            pole_corner_angle(reconstruct_from_curvature(lambda t: 0.0, 1.0), 1)


class TestAssemble:
    def test_mylar_oval(self):
        _, arc = build_arc(ArcSpec(L1, params=MYLAR))
        sec = assemble_cross_section(arc, 2)
        assert sec.ok
        assert sec.closure.endpoint_gap <= 1e-6
        assert sec.corner_exterior_angles == pytest.approx((0.0, 0.0), abs=1e-6)
        assert sec.closure.total_turning == pytest.approx(2 * math.pi, abs=1e-6)
        m = sec.metrics()
        assert m["width"] == pytest.approx(2.0, abs=1e-6)
        assert m["height"] == pytest.approx(oracles.THICKNESS_UNIT, abs=1e-6)
        # 4 int_0^1 f dx = 4 int_0^1 x^3/sqrt(1 - x^4) dx = 2 after integrating by parts.
        assert m["area"] == pytest.approx(2.0, abs=1e-9)
        assert m["perimeter"] == pytest.approx(4 * L1, abs=1e-12)

    def test_area_without_dense_solution_uses_samples(self):
        arc = reconstruct_from_curvature(lambda t: 1.0, 0.5 * math.pi, n_samples=40)
        bare = arc.transformed()
        sec = assemble_cross_section(bare, 2)
        assert sec.area is None
        assert sec.metrics()["area"] == pytest.approx(math.pi, abs=1e-6)

    def test_circle(self):
        arc = reconstruct_from_curvature(lambda t: 1.0, 0.5 * math.pi, n_samples=200)
        sec = assemble_cross_section(arc, 2)
        pts = sec.points()
        r = np.hypot(pts[:, 0], pts[:, 1])
        assert r == pytest.approx(np.ones_like(r), abs=1e-9)
        assert sec.metrics()["area"] == pytest.approx(math.pi, abs=1e-9)

    def test_half_profile_is_symmetric(self):
        _, arc = build_arc(ArcSpec(1.0, params=family_params(1.5, 1.0)))
        half = half_profile(arc)
        assert half.length == pytest.approx(2.0)
        assert half.start[0] == pytest.approx(half.end[0], abs=1e-14)
        assert half.start[1] == pytest.approx(-half.end[1], abs=1e-14)

    @pytest.mark.parametrize("n", [2, 3, 4, 6])
    def test_gauss_bonnet_generic(self, n):
        nu = 0.5 * shoot_nu(1.0, 0.0, n_fold=n)
        _, arc = build_arc(ArcSpec(1.0, params=family_params(nu, 1.0)))
        sec = assemble_cross_section(arc, n)
        assert sec.ok
        assert sec.n_arcs == n
        assert sec.closure.endpoint_gap <= 1e-9
        assert sec.closure.max_joint_gap <= 1e-9
        assert sec.closure.turning_plus_corners == pytest.approx(2 * math.pi, abs=1e-6)
        assert sec.corner_exterior_angles[0] == pytest.approx(pole_corner_angle(arc, n), abs=1e-9)

    def test_needs_two_arcs(self):
        _, arc = build_arc(ArcSpec(L1, params=MYLAR))
        with pytest.raises(UsageError):
            assemble_cross_section(arc, 1)


class TestShooting:
    def test_recovers_mylar(self):
        p = shoot_for_pole_angle(flat_radius(1.0), 0.0)
        assert family_coordinate(p, L1) == pytest.approx(NU_MYLAR, abs=1e-6)
        assert p.mu == pytest.approx(16.0, abs=1e-5)

    @pytest.mark.parametrize("nu0", [0.3, 1.0, 2.0, 2.5])
    def test_round_trip(self, nu0):
        angle = corner_angle_of_nu(nu0)
        assert shoot_nu(1.0, angle) == pytest.approx(nu0, abs=1e-8)

    @settings(max_examples=8, deadline=None)
    @given(st.floats(0.05, 3.0), st.floats(0.5, 3.0))
    def test_shoot_then_measure(self, target, L):
        p = shoot_for_pole_angle(L, target)
        _, arc = build_arc(ArcSpec(L, params=p))
        assert pole_corner_angle(arc) == pytest.approx(target, abs=1e-7)

    def test_negative_target_reports_range(self):
        with pytest.raises(NoSolutionError) as info:
            shoot_nu(1.0, -0.5)
        lo, hi = info.value.achievable
        assert hi == pytest.approx(math.pi)

    def test_vanishing_length(self):
        with pytest.raises(DegenerateArcError):
            shoot_nu(1e-12, 0.0)

    def test_pole_curvature_out_of_range(self):
        with pytest.raises(NoSolutionError):
            shoot_nu_for_pole_curvature(1.0, 5.0)

    def test_pole_curvature_takes_mylar_side(self):
        nu = shoot_nu_for_pole_curvature(1.0, 0.2)
        nu_end = shoot_nu_for_pole_curvature(1.0, 0.0)
        assert nu < nu_end
        k = corner_angle_of_nu(nu)
        assert k > 0


class TestSweep:
    def test_contains_mylar(self):
        rows = sweep_family([1.0, NU_MYLAR], L1)
        assert [r.index for r in rows] == [0, 1]
        assert rows[1].pole_angle == pytest.approx(0.0, abs=1e-7)
        assert rows[1].pole_curvature == pytest.approx(0.0, abs=1e-7)

    def test_single_point(self):
        assert len(sweep_family([1.0], 1.0)) == 1

    def test_continuous_on_monotone_grid(self):
        rows = sweep_family(np.linspace(0.2, NU_MYLAR, 12), 1.0)
        angles = np.array([r.pole_angle for r in rows])
        assert np.all(np.isfinite(angles))
        assert np.all(np.diff(angles) < 0)
        assert np.max(np.abs(np.diff(angles))) < 0.5

    def test_parallel_matches_serial(self):
        grid = np.linspace(0.3, 2.5, 7)
        assert sweep_family(grid, 1.0, workers=4) == sweep_family(grid, 1.0)

    def test_dilation(self):
        a = sweep_family([1.7], 1.0)[0]
        b = sweep_family([1.7], 3.0)[0]
        assert b.pole_angle == pytest.approx(a.pole_angle, abs=1e-9)
        assert b.width == pytest.approx(3 * a.width, rel=1e-9)
        assert b.area == pytest.approx(9 * a.area, rel=1e-9)
        assert b.pole_curvature == pytest.approx(a.pole_curvature / 3, rel=1e-8)

    def test_failures_recorded(self):
        rows = sweep_family([-1.0, 1.0], 1.0)
        assert rows[0].status != "ok" and math.isnan(rows[0].pole_angle)
        assert rows[1].status == "ok"

    def test_empty(self):
        with pytest.raises(UsageError):
            sweep_family([], 1.0)
