"""Planar curves from curvature, graph curvature, arclength and closure.

Orientation: positive curvature turns the tangent counter-clockwise. A
curve traversed clockwise (e.g. the upper half of a profile walked from the
pole outwards) therefore has negative curvature.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import UsageError
from .numerics import (
    DEFAULT_TOL,
    DenseTrajectory,
    Tolerances,
    integrate_adaptive,
    integrate_ode,
    integrate_singular_endpoint,
)


@dataclass(frozen=True)
class Pose:
    x: float = 0.0
    y: float = 0.0
    theta: float = 0.0


@dataclass(frozen=True)
class PlanarCurve:
    """Arclength-parameterised samples ``(t, x, y, theta)``.

    ``dense`` (optional) holds the canonical-frame integration of
    ``(theta, x, y)``; ``pose`` is the rigid motion that places it.
    """

    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    theta: np.ndarray
    dense: DenseTrajectory | None = None
    pose: Pose = Pose()

    def __post_init__(self) -> None:
        n = len(self.t)
        if not (len(self.x) == len(self.y) == len(self.theta) == n):
            raise UsageError("curve sample arrays must have equal length")
        if n > 1 and np.any(np.diff(self.t) <= 0):
            raise UsageError("curve arclength samples must be strictly increasing")

    @property
    def length(self) -> float:
        return float(self.t[-1] - self.t[0])

    @property
    def start(self) -> np.ndarray:
        return np.array([self.x[0], self.y[0]])

    @property
    def end(self) -> np.ndarray:
        return np.array([self.x[-1], self.y[-1]])

    def at(self, tq) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """``(x, y, theta)`` at arclength ``tq``; needs the dense solution."""
        if self.dense is None:
            raise UsageError("curve carries no dense solution; use its samples")
        st = np.atleast_2d(self.dense(np.asarray(tq, dtype=float) - self.t[0]))
        return _place(st[:, 1], st[:, 2], st[:, 0], self.pose)

    def resampled(self, n: int) -> "PlanarCurve":
        """Curve with ``n`` equispaced arclength samples (endpoints included)."""
        ts = np.linspace(self.t[0], self.t[-1], n)
        x, y, th = self.at(ts)
        return PlanarCurve(ts, x, y, th, self.dense, self.pose)

    def transformed(self, rotation: float = 0.0, shift=(0.0, 0.0),
                    reflect_x: bool = False) -> "PlanarCurve":
        """Rigid image: optional reflection ``y -> -y``, then rotation, then shift.

        The result keeps only the samples.
        """
        x, y, th = self.x, self.y, self.theta
        if reflect_x:
            y, th = -y, -th
        c, s = math.cos(rotation), math.sin(rotation)
        return PlanarCurve(self.t, c * x - s * y + shift[0], s * x + c * y + shift[1],
                           th + rotation)

    def reversed(self) -> "PlanarCurve":
        """Same point set traversed backwards; arclength restarts at 0."""
        t = self.t[-1] - self.t[::-1]
        return PlanarCurve(t, self.x[::-1].copy(), self.y[::-1].copy(),
                           self.theta[::-1] + math.pi)

    def shifted_arclength(self, t0: float) -> "PlanarCurve":
        return PlanarCurve(self.t - self.t[0] + t0, self.x, self.y, self.theta)


@dataclass(frozen=True)
class ClosureReport:
    endpoint_gap: float
    total_turning: float
    corner_sum: float
    max_joint_gap: float = 0.0

    @property
    def turning_plus_corners(self) -> float:
        return self.total_turning + self.corner_sum


def _place(x, y, theta, pose: Pose):
    c, s = math.cos(pose.theta), math.sin(pose.theta)
    return c * x - s * y + pose.x, s * x + c * y + pose.y, theta + pose.theta


def reconstruct_from_curvature(
    kfun: Callable[[float], float],
    L: float,
    pose0: Pose = Pose(),
    tol: Tolerances = DEFAULT_TOL,
    n_samples: int | None = None,
) -> PlanarCurve:
    """Integrate ``theta' = k, x' = cos theta, y' = sin theta`` over ``[0, L]``.

    The integration runs in the canonical frame (origin, heading 0) and the
    result is placed by ``pose0``, so a rigid motion of ``pose0`` moves the
    output rigidly. Samples are the integrator nodes unless ``n_samples`` is
    given.
    """
    if not L > 0:
        raise UsageError(f"curve length must be positive, got {L}")

    def fld(t, s):
        th = s[0]
        return np.array([float(kfun(t)), math.cos(th), math.sin(th)])

    dense = integrate_ode(fld, [0.0, 0.0, 0.0], 0.0, float(L), tol)
    if n_samples is None:
        t, st = dense.t, dense.y
    else:
        if n_samples < 2:
            raise UsageError("need at least 2 samples")
        t = np.linspace(0.0, float(L), n_samples)
        st = dense(t)
    x, y, th = _place(st[:, 1], st[:, 2], st[:, 0], pose0)
    return PlanarCurve(np.array(t), x, y, th, dense, pose0)


def curvature_from_graph(fp, fpp):
    """Signed curvature ``f'' / (1 + f'^2)^(3/2)`` of the graph of ``f``."""
    fp = np.asarray(fp, dtype=float)
    return np.asarray(fpp, dtype=float) / (1.0 + fp * fp) ** 1.5


def _is_singular(fp: Callable, x: float) -> bool:
    try:
        with np.errstate(divide="ignore", invalid="ignore"):
            v = float(np.asarray(fp(np.array([x])), dtype=float).reshape(-1)[0])
    except (ZeroDivisionError, ValueError, FloatingPointError):
        return True
    return not math.isfinite(v)


def arclength_of_graph(
    fp: Callable,
    x0: float,
    x1: float,
    tol: Tolerances = DEFAULT_TOL,
    singular_end: str | None = None,
    with_gap: bool = False,
) -> float:
    """``int_{x0}^{x1} sqrt(1 + f'(x)^2) dx``.

    An end where ``f'`` is infinite (vertical tangent) is detected and
    treated as an inverse-square-root singularity unless ``singular_end`` is
    given explicitly. ``with_gap`` forwards to
    :func:`integrate_singular_endpoint` (``fp`` then takes ``(x, gap)``).
    """
    if x1 == x0:
        return 0.0
    if x1 < x0:
        return -arclength_of_graph(fp, x1, x0, tol, singular_end, with_gap)
    if singular_end is None and not with_gap:
        left, right = _is_singular(fp, x0), _is_singular(fp, x1)
        singular_end = {(True, True): "both", (True, False): "left",
                        (False, True): "right"}.get((left, right))
    if singular_end is None:
        res = integrate_adaptive(lambda x: np.sqrt(1.0 + np.asarray(fp(x)) ** 2), x0, x1, tol)
    elif with_gap:
        res = integrate_singular_endpoint(
            lambda x, gap: np.sqrt(1.0 + np.asarray(fp(x, gap)) ** 2),
            x0, x1, singular_end, tol, with_gap=True)
    else:
        res = integrate_singular_endpoint(
            lambda x: np.sqrt(1.0 + np.asarray(fp(x)) ** 2), x0, x1, singular_end, tol)
    return res.value


def total_turning(curve: PlanarCurve) -> float:
    """``theta(L) - theta(0)``, i.e. the integral of the curvature."""
    return float(curve.theta[-1] - curve.theta[0])


def wrap_angle(a: float) -> float:
    """Angle reduced to ``(-pi, pi]``."""
    r = math.remainder(a, 2.0 * math.pi)
    return math.pi if r == -math.pi else r


def closure_report(arcs: Sequence[PlanarCurve], corner_angles: Sequence[float]) -> ClosureReport:
    """Gauss-Bonnet accounting for a chain of arcs.

    ``corner_angles[i]`` is the exterior angle between arc ``i`` and arc
    ``i+1`` (cyclically); an empty list means all joints are smooth.

    Raises:
        UsageError: no arcs, or a corner list of the wrong length.
    """
    if not arcs:
        raise UsageError("closure_report needs at least one arc")
    corners = list(corner_angles)
    if corners and len(corners) != len(arcs):
        raise UsageError(
            f"{len(arcs)} arcs need {len(arcs)} corner angles (or none), got {len(corners)}")
    joints = [float(np.hypot(*(arcs[i + 1].start - arcs[i].end))) for i in range(len(arcs) - 1)]
    gap = float(np.hypot(*(arcs[-1].end - arcs[0].start)))
    return ClosureReport(
        endpoint_gap=gap,
        total_turning=math.fsum(total_turning(a) for a in arcs),
        corner_sum=math.fsum(corners),
        max_joint_gap=max(joints, default=0.0),
    )
