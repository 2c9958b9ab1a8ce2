"""The profile curvature equation and its solution family.

The curvature ``k(t)`` of an inflated-surface profile, parameterised by
arclength, solves

    k k''' - k' k'' + k^3 k' = 0.

Dividing by ``k^2`` and integrating once gives the reduced planar system
``k'' = lam*k - k^3/2``, and a second integration gives

    (k')^2 = I2 + lam*k^2 - k^4/4,        I2 = (mu - lam^2)/4,

so every non-constant solution is labelled by the pair ``(lam, mu)``. The
quantity ``Q = k k'' - (k')^2 + k^4/4`` is conserved and equals ``-I2``.
Solutions through ``k = 0`` satisfy the implicit relation

    int_0^k ds / sqrt((mu - lam^2) + 4 lam s^2 - s^4) = t/2.

Sign convention: the primary branch starts at ``k(0) = 0`` with
``k'(0) = +sqrt(mu - lam^2)/2``; profiles with negative curvature are the
``c = -1`` rescaling of it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateStateError,
    DomainError,
    NoBranchError,
    UnreachableCurvatureError,
    UsageError,
)
from .numerics import (
    DEFAULT_TOL,
    DenseTrajectory,
    Tolerances,
    find_root_bracketed,
    integrate_ode,
    integrate_singular_endpoint,
)

DEGENERATE_EPS = 1e-6
# Local error target relative to the caller's tolerance. Conserved-quantity
# drift accumulates over the span, and Q can be small next to k^4, so the
# step control runs three decades tighter than the requested accuracy.
LOCAL_TOL_FACTOR = 1e-3


@dataclass(frozen=True)
class ProfileParams:
    """Constants ``(lam, mu)`` labelling one member of the solution family."""

    lam: float
    mu: float

    @property
    def I2(self) -> float:
        return (self.mu - self.lam**2) / 4.0

    @property
    def Q(self) -> float:
        return -self.I2

    def radicand(self, s):
        """``(mu - lam^2) + 4 lam s^2 - s^4``; equals ``4 (k')^2`` at ``k = s``."""
        s2 = np.asarray(s, dtype=float) ** 2
        return (self.mu - self.lam**2) + 4.0 * self.lam * s2 - s2 * s2

    def turning_curvature(self) -> float | None:
        """Largest positive root of the radicand, or None if there is none."""
        disc = 3.0 * self.lam**2 + self.mu
        if disc < 0:
            return None
        w = 2.0 * self.lam + math.sqrt(disc)
        if w <= 0:
            return None
        return math.sqrt(w)


@dataclass(frozen=True)
class CurvatureState:
    t: float
    k: float
    kp: float
    kpp: float


def ode_residual(s: CurvatureState, kppp: float) -> float:
    """``k k''' - k' k'' + k^3 k'``; zero exactly on solutions."""
    return s.k * kppp - s.kp * s.kpp + s.k**3 * s.kp


def reduced_field(k: float, kp: float, lam: float) -> tuple[float, float]:
    return kp, lam * k - 0.5 * k**3


def conserved_Q(s: CurvatureState) -> float:
    return s.k * s.kpp - s.kp**2 + 0.25 * s.k**4


def params_from_state(s: CurvatureState, eps: float = DEGENERATE_EPS) -> ProfileParams:
    """Recover ``(lam, mu)`` from a single state.

    Raises:
        DegenerateStateError: ``|k| <= eps``; ``lam`` is undefined there and
            only :func:`conserved_Q` carries information.
    """
    if abs(s.k) <= eps:
        raise DegenerateStateError(
            f"|k|={abs(s.k):.3e} <= {eps:g}: lambda is undefined at zero curvature; use conserved_Q")
    lam = (s.kpp + 0.5 * s.k**3) / s.k
    mu = lam**2 + 4.0 * (s.kp**2 - lam * s.k**2 + 0.25 * s.k**4)
    return ProfileParams(lam, mu)


def _params_from_initial(k0: float, kp0: float, lam: float) -> ProfileParams:
    return ProfileParams(lam, lam**2 + 4.0 * (kp0**2 - lam * k0**2 + 0.25 * k0**4))


@dataclass(frozen=True)
class Trajectory:
    """A solved curvature profile on ``[0, span]``.

    The stored dense solution is in the frame it was integrated in; the view
    ``k(t) = k_scale * k_raw(t_scale * t)`` implements dilations without
    re-integration.
    """

    params: ProfileParams
    dense: DenseTrajectory
    span: float
    k_scale: float = 1.0
    t_scale: float = 1.0

    def _raw(self, t):
        tq = self.t_scale * np.asarray(t, dtype=float)
        return self.dense(tq)

    def k(self, t):
        st = self._raw(t)
        return self.k_scale * st[..., 0]

    def kp(self, t):
        st = self._raw(t)
        return self.k_scale * self.t_scale * st[..., 1]

    def kpp(self, t):
        k = self.k(t)
        return self.params.lam * k - 0.5 * k**3

    def kppp(self, t):
        k, kp = self.k(t), self.kp(t)
        return self.params.lam * kp - 1.5 * k**2 * kp

    def state(self, t: float) -> CurvatureState:
        st = self._raw(t)
        k = float(self.k_scale * st[0])
        kp = float(self.k_scale * self.t_scale * st[1])
        return CurvatureState(float(t), k, kp, self.params.lam * k - 0.5 * k**3)

    def sample(self, n: int) -> dict[str, np.ndarray]:
        """``n`` equispaced samples of ``t, k, kp, kpp`` over the span."""
        t = np.linspace(0.0, self.span, n)
        st = self._raw(t)
        k = self.k_scale * st[:, 0]
        kp = self.k_scale * self.t_scale * st[:, 1]
        return {"t": t, "k": k, "kp": kp, "kpp": self.params.lam * k - 0.5 * k**3}

    def max_abs_k(self, n: int = 257) -> float:
        nodes = self.dense.t / self.t_scale
        ts = np.concatenate([np.linspace(0.0, self.span, n),
                             nodes[(nodes >= 0) & (nodes <= self.span)]])
        return float(np.max(np.abs(self.k(ts))))


def solve_ivp(
    k0: float, kp0: float, lam: float, L: float, tol: Tolerances = DEFAULT_TOL
) -> Trajectory:
    """Integrate the reduced system from ``(k0, kp0)`` over ``[0, L]``.

    ``params`` of the result carries ``lam`` as given and ``mu`` from the
    first integral at the initial state.
    """
    if not L > 0:
        raise UsageError(f"L must be positive, got {L}")

    def fld(_t, y):
        return np.array([y[1], lam * y[0] - 0.5 * y[0] ** 3])

    dense = integrate_ode(fld, [k0, kp0], 0.0, L, tol.scaled(LOCAL_TOL_FACTOR))
    return Trajectory(_params_from_initial(k0, kp0, lam), dense, float(L))


def rescale_solution(traj: Trajectory, c: float) -> Trajectory:
    """Dilation ``k~(t) = c k(|c| t)``; ``lam -> c^2 lam``, ``mu -> c^4 mu``.

    For ``c < 0`` this composes the dilation by ``|c|`` with the sign flip
    ``k -> -k``; both preserve the equation.
    """
    if c == 0:
        raise UsageError("rescale factor must be non-zero")
    a = abs(c)
    return Trajectory(
        ProfileParams(c * c * traj.params.lam, c**4 * traj.params.mu),
        traj.dense,
        traj.span / a,
        traj.k_scale * c,
        traj.t_scale * a,
    )


def _check_tol_for_quadrature(tol: Tolerances) -> Tolerances:
    # The time integral is compared against ODE data at ~1e-10; keep a margin.
    return Tolerances(min(tol.abs_tol, 1e-13), min(tol.rel_tol, 1e-13), tol.max_steps)


def implicit_time_of_k(
    k_target: float, p: ProfileParams, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Arclength from ``k = 0`` to ``k_target`` along the monotone branch.

    ``t = 2 int_0^|k_target| ds / sqrt(R(s))``. A target at the turning
    curvature (root of ``R``) is handled by the singular-endpoint rule.

    Raises:
        NoBranchError: ``mu - lam^2 <= 0`` (``R`` is not positive near 0).
        UnreachableCurvatureError: ``|k_target|`` is beyond the turning
            curvature.
    """
    kt = abs(float(k_target))
    if kt == 0.0:
        return 0.0
    r0 = p.mu - p.lam**2
    if r0 <= 0:
        raise NoBranchError(
            f"mu - lam^2 = {r0:.6g} <= 0: no non-trivial branch leaves k = 0 with finite time")
    k_turn = p.turning_curvature()
    # With R(0) > 0 the quadratic in s^2 has exactly one positive root.
    assert k_turn is not None
    if kt > k_turn * (1.0 + 1e-14):
        raise UnreachableCurvatureError(
            f"|k|={kt:.12g} exceeds the turning curvature {k_turn:.12g} (R < 0 beyond it)")
    kt = min(kt, k_turn)
    c = math.sqrt(3.0 * p.lam**2 + p.mu) - 2.0 * p.lam
    qtol = _check_tol_for_quadrature(tol)
    # k_turn - s = delta + gap, with the gap to the upper limit passed exactly;
    # targets just below the turning point would otherwise cancel to zero.
    delta = k_turn - kt

    def g(s, gap):
        return 1.0 / np.sqrt((delta + gap) * (k_turn + s) * (s * s + c))
    res = integrate_singular_endpoint(g, 0.0, kt, "right", qtol, with_gap=True)
    return 2.0 * res.value


def _primary_branch_k(t: float, p: ProfileParams, tol: Tolerances) -> float:
    """Curvature at ``t`` on the primary branch, ``t`` within one quarter period."""
    k_turn = p.turning_curvature()
    t_turn = implicit_time_of_k(k_turn, p, tol)
    if t >= t_turn:
        return k_turn
    root_tol = Tolerances(1e-15 * max(k_turn, 1e-300), tol.rel_tol, 200)
    return find_root_bracketed(lambda k: implicit_time_of_k(k, p, tol) - t, 0.0, k_turn, root_tol)


def invert_implicit(
    t: float, p: ProfileParams, tol: Tolerances = DEFAULT_TOL, sign: int = 1
) -> float:
    """Curvature ``k(t)`` on the branch through ``k(0) = 0``.

    The branch with ``k'(0) > 0`` is returned (``sign=-1`` gives its mirror).
    Beyond the turning time ``T`` the solution is continued by the
    reflection ``k(T + s) = k(T - s)`` and the odd symmetry
    ``k(t + 2T) = -k(t)``, i.e. periodically with period ``4T``.

    Raises:
        NoBranchError: ``mu - lam^2 < 0`` with ``t > 0``.
    """
    if t < 0:
        raise DomainError(f"t must be >= 0, got {t}")
    if t == 0:
        return 0.0
    r0 = p.mu - p.lam**2
    if r0 < 0:
        raise NoBranchError(
            f"mu - lam^2 = {r0:.6g} < 0: no solution passes through k = 0 "
            "(the double-zero family needs implicit_double_zero)")
    if r0 == 0:
        return 0.0
    k_turn = p.turning_curvature()
    T = implicit_time_of_k(k_turn, p, tol)
    phase, flip, _ = _fold_phase(t, T)
    return sign * flip * _primary_branch_k(phase, p, tol)


def _fold_phase(t: float, T: float) -> tuple[float, float, float]:
    """Map ``t`` into the first quarter period: ``(phase, sign of k, sign of k')``."""
    phase = math.fmod(t, 4.0 * T)
    flip = 1.0
    if phase >= 2.0 * T:
        phase -= 2.0 * T
        flip = -1.0
    slope = flip
    if phase > T:
        phase = 2.0 * T - phase
        slope = -slope
    return phase, flip, slope


def implicit_state(
    t: float, p: ProfileParams, tol: Tolerances = DEFAULT_TOL, sign: int = 1
) -> tuple[float, float]:
    """``(k, k')`` at ``t`` on the branch through ``k(0) = 0``.

    ``k'`` comes from the first integral, ``|k'| = sqrt(R(k))/2``, signed by
    the quarter period ``t`` falls in.
    """
    k = invert_implicit(t, p, tol, sign)
    r0 = p.mu - p.lam**2
    if t == 0:
        return 0.0, sign * 0.5 * math.sqrt(max(r0, 0.0))
    if r0 == 0:
        return 0.0, 0.0
    T = implicit_time_of_k(p.turning_curvature(), p, tol)
    _, _, slope = _fold_phase(t, T)
    return k, sign * slope * 0.5 * math.sqrt(max(float(p.radicand(k)), 0.0))


def double_zero_params(lambda_00: float) -> ProfileParams:
    """Reduced-system constants of the family with ``k(0) = k'(0) = 0``.

    ``R(s) = lambda_00 s^2 - s^4`` is the ``mu = lam^2`` case of the general
    radicand with ``lam = lambda_00/4``.
    """
    lam = lambda_00 / 4.0
    return ProfileParams(lam, lam * lam)


def double_zero_time_between(
    k_from: float, k_to: float, lambda_00: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """``2 int_{k_from}^{k_to} ds / sqrt(lambda_00 s^2 - s^4)`` (signed).

    Both limits must lie in ``(0, sqrt(lambda_00)]``; the upper end may be the
    turning point.
    """
    if lambda_00 <= 0:
        raise DomainError(f"lambda_00 must be positive, got {lambda_00}")
    root = math.sqrt(lambda_00)
    for k in (k_from, k_to):
        if not 0.0 < k <= root * (1.0 + 1e-14):
            raise DomainError(f"curvature {k} outside (0, sqrt(lambda_00)] = (0, {root}]")
    lo, hi = sorted((min(k_from, root), min(k_to, root)))
    if lo == hi:
        return 0.0
    sgn = 1.0 if k_to >= k_from else -1.0
    qtol = _check_tol_for_quadrature(tol)
    # s^2 (lambda - s^2) = s^2 (root - s)(root + s)
    if hi == root:
        def g(s, gap):
            return 1.0 / (s * np.sqrt(gap * (root + s)))
    else:
        def g(s, gap):
            return 1.0 / (s * np.sqrt((root - s) * (root + s)))
    res = integrate_singular_endpoint(g, lo, hi, "right", qtol, with_gap=True)
    return sgn * 2.0 * res.value


def implicit_double_zero(
    k_target: float, lambda_00: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Arclength from the reference level ``sqrt(lambda_00)/2`` to ``k_target``.

    Solutions with ``k(0) = k'(0) = 0`` only approach zero asymptotically
    (the time integral diverges like ``log k``), so time is measured from a
    reference curvature. Negative targets use the mirror branch.

    Raises:
        DomainError: ``|k_target|`` outside ``(0, sqrt(lambda_00)]``.
    """
    if lambda_00 <= 0:
        raise DomainError(f"lambda_00 must be positive, got {lambda_00}")
    k_ref = 0.5 * math.sqrt(lambda_00)
    return double_zero_time_between(k_ref, abs(k_target), lambda_00, tol)
