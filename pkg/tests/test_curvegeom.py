import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles
from inflated.curvegeom import (
    PlanarCurve,
    Pose,
    arclength_of_graph,
    closure_report,
    curvature_from_graph,
    reconstruct_from_curvature,
    total_turning,
    wrap_angle,
)
from inflated.errors import UsageError
from inflated.mylar import paulsen_height, paulsen_slope
from inflated.numerics import Tolerances, central_difference, integrate_adaptive
from inflated.profile_ode import ProfileParams, invert_implicit, solve_ivp

MYLAR = ProfileParams(0.0, 16.0)


def mylar_k(t):
    # Negative curvature walking from the pole outwards: the upper profile.
    return -invert_implicit(min(float(t), oracles.FLAT_RADIUS_UNIT), MYLAR)


class TestReconstruct:
    def test_segment(self):
        c = reconstruct_from_curvature(lambda t: 0.0, 1.0)
        assert c.end == pytest.approx([1.0, 0.0], abs=1e-15)
        assert total_turning(c) == 0.0

    def test_unit_circle(self):
        c = reconstruct_from_curvature(lambda t: 1.0, 2 * math.pi)
        assert closure_report([c], []).endpoint_gap <= 1e-9
        assert total_turning(c) == pytest.approx(2 * math.pi, abs=1e-12)

    @settings(max_examples=20, deadline=None)
    @given(st.floats(0.2, 5.0), st.floats(0.5, 6.0))
    def test_constant_curvature_is_a_circle(self, c, L):
        curve = reconstruct_from_curvature(lambda t: c, L, n_samples=50)
        # Centre sits one radius to the left of the east-heading start.
        r = np.hypot(curve.x, curve.y - 1.0 / c)
        assert r == pytest.approx(np.full_like(r, 1.0 / c), abs=1e-9)

    def test_mylar_from_pole_hits_graph(self):
        H = oracles.HEIGHT_UNIT
        c = reconstruct_from_curvature(mylar_k, oracles.FLAT_RADIUS_UNIT, Pose(0.0, H, 0.0))
        assert c.end == pytest.approx([1.0, 0.0], abs=1e-6)
        xs, ys, _ = c.at(np.linspace(0.0, 0.9 * oracles.FLAT_RADIUS_UNIT, 9))
        graph = np.array([paulsen_height(float(x), 1.0) for x in xs])
        assert ys == pytest.approx(graph, abs=1e-6)

    @settings(max_examples=15, deadline=None)
    @given(st.floats(-5, 5), st.floats(-5, 5), st.floats(-math.pi, math.pi))
    def test_rigid_motion_equivariance(self, dx, dy, rot):
        k = lambda t: 0.3 + math.sin(2 * t)  # noqa: E731
        base = reconstruct_from_curvature(k, 3.0, n_samples=40)
        moved = reconstruct_from_curvature(k, 3.0, Pose(dx, dy, rot), n_samples=40)
        image = base.transformed(rot, (dx, dy))
        assert moved.x == pytest.approx(image.x, abs=1e-12)
        assert moved.y == pytest.approx(image.y, abs=1e-12)
        assert moved.theta == pytest.approx(image.theta, abs=1e-12)

    def test_turning_equals_curvature_integral(self):
        k = lambda t: 1.0 + 0.5 * np.cos(3 * t)  # noqa: E731
        c = reconstruct_from_curvature(lambda t: float(k(t)), 4.0)
        ref = integrate_adaptive(k, 0.0, 4.0, Tolerances(1e-13, 1e-13)).value
        assert total_turning(c) == pytest.approx(ref, abs=1e-9)

    def test_bad_length(self):
        with pytest.raises(UsageError):
            reconstruct_from_curvature(lambda t: 1.0, 0.0)

    def test_dense_query_and_resample(self):
        c = reconstruct_from_curvature(lambda t: 1.0, math.pi)
        r = c.resampled(5)
        assert len(r.t) == 5
        assert r.end == pytest.approx([0.0, 2.0], abs=1e-10)

    def test_samples_only_curve_cannot_be_queried(self):
        c = PlanarCurve(np.array([0.0, 1.0]), np.zeros(2), np.zeros(2), np.zeros(2))
        with pytest.raises(UsageError):
            c.at(0.5)


class TestCurveOps:
    def test_reversed_keeps_points(self):
        c = reconstruct_from_curvature(lambda t: 1.0, 1.0, n_samples=11)
        r = c.reversed()
        assert r.start == pytest.approx(c.end)
        assert r.t[0] == 0.0 and r.length == pytest.approx(c.length)
        assert total_turning(r) == pytest.approx(-total_turning(c))

    def test_reflection(self):
        c = reconstruct_from_curvature(lambda t: 1.0, 1.0, n_samples=11)
        m = c.transformed(reflect_x=True)
        assert m.y == pytest.approx(-c.y)
        assert total_turning(m) == pytest.approx(-total_turning(c))

    def test_bad_samples(self):
        with pytest.raises(UsageError):
            PlanarCurve(np.array([0.0, 0.0]), np.zeros(2), np.zeros(2), np.zeros(2))
        with pytest.raises(UsageError):
            PlanarCurve(np.array([0.0, 1.0]), np.zeros(3), np.zeros(2), np.zeros(2))

    @pytest.mark.parametrize("a,expect", [(0.0, 0.0), (math.pi, math.pi), (-math.pi, math.pi),
                                          (3 * math.pi, math.pi), (7.0, 7.0 - 2 * math.pi)])
    def test_wrap(self, a, expect):
        assert wrap_angle(a) == pytest.approx(expect, abs=1e-15)


class TestGraph:
    def test_flat(self):
        assert curvature_from_graph(0.0, 0.0) == 0.0

    def test_parabola_vertex(self):
        assert curvature_from_graph(0.0, 2.0) == 2.0

    def test_paulsen_closed_form(self):
        x = np.linspace(0.0, 0.95, 50)
        fp = -x**2 / np.sqrt(1 - x**4)
        fpp = -2 * x / (1 - x**4) ** 1.5
        assert curvature_from_graph(fp, fpp) == pytest.approx(-2 * x, abs=1e-14)

    def test_paulsen_differenced_heights_are_linear(self):
        # f' by differencing quadrature heights; f'' by differencing the slope.
        # The even extension of f makes the x = 0 difference exact.
        x = np.linspace(0.0, 0.95, 40)
        tol = Tolerances(1e-14, 1e-14)

        def f(v):
            return np.array([paulsen_height(float(abs(xi)), 1.0, tol) for xi in np.atleast_1d(v)])

        fp = central_difference(f, x, 5e-4)
        fpp = central_difference(lambda v: paulsen_slope(v, 1.0), x, 1e-4)
        k = curvature_from_graph(fp, fpp)
        assert np.max(np.abs(k + 2 * x)) <= 1e-7

    def test_arclength_flat(self):
        assert arclength_of_graph(lambda x: 0.0 * x, 0.0, 1.0) == pytest.approx(1.0, abs=1e-15)

    def test_arclength_diagonal(self):
        assert arclength_of_graph(lambda x: 1.0 + 0.0 * x, 0.0, 1.0) == pytest.approx(
            math.sqrt(2), abs=1e-14)

    def test_arclength_paulsen_detects_vertical_tangent(self):
        with np.errstate(divide="ignore", invalid="ignore"):
            s = arclength_of_graph(lambda x: paulsen_slope(x, 1.0), 0.0, 1.0)
        assert s == pytest.approx(oracles.FLAT_RADIUS_UNIT, abs=1e-7)

    def test_arclength_paulsen_with_gap(self):
        s = arclength_of_graph(lambda u, gap: paulsen_slope(u, 1.0, gap), 0.0, 1.0,
                               singular_end="right", with_gap=True)
        assert s == pytest.approx(oracles.FLAT_RADIUS_UNIT, abs=1e-10)

    def test_arclength_orientation(self):
        assert arclength_of_graph(lambda x: x, 1.0, 0.0) == pytest.approx(
            -arclength_of_graph(lambda x: x, 0.0, 1.0))


class TestClosure:
    def test_full_circle(self):
        c = reconstruct_from_curvature(lambda t: 1.0, 2 * math.pi)
        rep = closure_report([c], [])
        assert rep.endpoint_gap <= 1e-9
        assert rep.total_turning == pytest.approx(2 * math.pi)

    def test_square(self):
        sides = []
        pose = Pose()
        for i in range(4):
            sides.append(reconstruct_from_curvature(lambda t: 0.0, 1.0, pose))
            pose = Pose(float(sides[-1].x[-1]), float(sides[-1].y[-1]), (i + 1) * math.pi / 2)
        rep = closure_report(sides, [math.pi / 2] * 4)
        assert rep.endpoint_gap == pytest.approx(0.0, abs=1e-14)
        assert rep.total_turning == 0.0
        assert rep.corner_sum == pytest.approx(2 * math.pi)
        assert rep.max_joint_gap == pytest.approx(0.0, abs=1e-14)

    def test_mirrored_mylar_halves(self):
        H = oracles.HEIGHT_UNIT
        L = oracles.FLAT_RADIUS_UNIT
        upper = reconstruct_from_curvature(mylar_k, L, Pose(0.0, H, 0.0))
        right = PlanarCurve(upper.t, upper.x, upper.y, upper.theta)
        q2 = right.transformed(reflect_x=True).reversed()
        q3 = right.transformed(math.pi).shifted_arclength(0.0)
        q4 = right.transformed(math.pi, reflect_x=True).reversed()
        rep = closure_report([right, q2, q3, q4], [])
        assert rep.endpoint_gap <= 1e-6
        assert rep.max_joint_gap <= 1e-6
        assert abs(abs(rep.turning_plus_corners) - 2 * math.pi) <= 1e-6

    def test_mismatched_lengths(self):
        c = reconstruct_from_curvature(lambda t: 0.0, 1.0)
        with pytest.raises(UsageError):
            closure_report([c, c], [0.0])
        with pytest.raises(UsageError):
            closure_report([], [])


def test_solve_and_reconstruct_quarter_turn():
    tr = solve_ivp(0.0, -2.0, 0.0, oracles.FLAT_RADIUS_UNIT)
    c = reconstruct_from_curvature(lambda t: float(tr.k(t)), oracles.FLAT_RADIUS_UNIT)
    assert total_turning(c) == pytest.approx(-math.pi / 2, abs=1e-7)
