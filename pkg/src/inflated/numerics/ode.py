"""Dormand-Prince 5(4) integrator with continuous (dense) output."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from ..errors import BudgetExceededError, SingularityError, UsageError
from .tolerances import DEFAULT_TOL, Tolerances

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Quartic continuous extension (Shampine's coefficients): y(t + th*h) =
# y + h * K^T @ P @ [th, th^2, th^3, th^4]. Its derivative matches f at
# both ends of the step, so the interpolant is C^1 across nodes.
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

Field = Callable[[float, np.ndarray], np.ndarray]


@dataclass(frozen=True)
class DenseTrajectory:
    """Accepted steps of an integration plus their quartic interpolants.

    Attributes:
        t: node times, strictly increasing, shape ``(n,)``.
        y: node states, shape ``(n, d)``.
        coeffs: per-interval polynomial coefficients, shape ``(n-1, d, 4)``;
            the interpolant on interval ``i`` is
            ``y[i] + h_i * coeffs[i] @ [th, th**2, th**3, th**4]``.
    """

    t: np.ndarray
    y: np.ndarray
    coeffs: np.ndarray

    def __post_init__(self) -> None:
        for arr in (self.t, self.y, self.coeffs):
            arr.flags.writeable = False

    @property
    def t0(self) -> float:
        return float(self.t[0])

    @property
    def t1(self) -> float:
        return float(self.t[-1])

    @property
    def dim(self) -> int:
        return self.y.shape[1]

    def _locate(self, tq: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        span = self.t1 - self.t0
        slack = 1e-12 * max(span, 1.0)
        if np.any(tq < self.t0 - slack) or np.any(tq > self.t1 + slack):
            raise UsageError(
                f"evaluation outside [{self.t0}, {self.t1}]: {tq.min()}..{tq.max()}")
        n = len(self.t)
        idx = np.clip(np.searchsorted(self.t, tq, side="right") - 1, 0, max(n - 2, 0))
        h = self.t[np.minimum(idx + 1, n - 1)] - self.t[idx]
        with np.errstate(invalid="ignore", divide="ignore"):
            theta = np.where(h > 0, (tq - self.t[idx]) / h, 0.0)
        return idx, h, theta

    def __call__(self, tq) -> np.ndarray:
        """States at ``tq`` (scalar -> ``(d,)``, array -> ``(m, d)``).

        Node times return the stored node state exactly.
        """
        scalar = np.ndim(tq) == 0
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        if len(self.t) == 1:
            out = np.repeat(self.y[:1], len(tq), axis=0)
            return out[0] if scalar else out
        idx, h, theta = self._locate(tq)
        powers = np.stack([theta, theta**2, theta**3, theta**4], axis=-1)
        out = self.y[idx] + h[:, None] * np.einsum("mdk,mk->md", self.coeffs[idx], powers)
        exact = self.t[idx] == tq
        out[exact] = self.y[idx[exact]]
        last = tq == self.t[-1]
        out[last] = self.y[-1]
        return out[0] if scalar else out

    def derivative(self, tq) -> np.ndarray:
        """Time derivative of the interpolant at ``tq``."""
        scalar = np.ndim(tq) == 0
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        if len(self.t) == 1:
            out = np.zeros((len(tq), self.dim))
            return out[0] if scalar else out
        idx, _, theta = self._locate(tq)
        dpow = np.stack([np.ones_like(theta), 2 * theta, 3 * theta**2, 4 * theta**3], axis=-1)
        out = np.einsum("mdk,mk->md", self.coeffs[idx], dpow)
        return out[0] if scalar else out


def _initial_step(field, t0, y0, f0, direction_span, atol, rtol):
    # Hairer, Norsett & Wanner, "Solving ODEs I", II.4.
    scale = atol + rtol * np.abs(y0)
    d0 = np.sqrt(np.mean((y0 / scale) ** 2))
    d1 = np.sqrt(np.mean((f0 / scale) ** 2))
    h0 = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
    h0 = min(h0, direction_span)
    y1 = y0 + h0 * f0
    f1 = np.asarray(field(t0 + h0, y1), dtype=float)
    d2 = np.sqrt(np.mean(((f1 - f0) / scale) ** 2)) / h0
    if d1 <= 1e-15 and d2 <= 1e-15:
        h1 = max(1e-6, h0 * 1e-3)
    else:
        h1 = (0.01 / max(d1, d2)) ** (1 / 5)
    return min(100 * h0, h1, direction_span)


def integrate_ode(
    field: Field,
    state0,
    t0: float,
    t1: float,
    tol: Tolerances = DEFAULT_TOL,
    max_step: float = np.inf,
) -> DenseTrajectory:
    """Integrate ``y' = field(t, y)`` from ``t0`` to ``t1 >= t0``.

    Local error per step is held below ``abs_tol + rel_tol*|y|`` in the RMS
    norm. The returned trajectory can be evaluated anywhere in ``[t0, t1]``.

    Raises:
        SingularityError: step size underflow or persistent non-finite
            states; ``partial`` carries the trajectory up to that point.
        BudgetExceededError: more than ``max_steps`` attempted steps.
    """
    y = np.array(state0, dtype=float).reshape(-1)
    t0, t1 = float(t0), float(t1)
    if not t1 >= t0:
        raise UsageError(f"integrate_ode needs t1 >= t0, got {t0} -> {t1}")
    ts, ys, cs = [t0], [y.copy()], []

    def pack():
        coeffs = np.array(cs) if cs else np.zeros((0, len(y), 4))
        return DenseTrajectory(np.array(ts), np.array(ys), coeffs)

    if t1 == t0:
        return pack()

    atol, rtol = tol.abs_tol, tol.rel_tol
    f = np.asarray(field(t0, y), dtype=float)
    h = _initial_step(field, t0, y, f, t1 - t0, atol, rtol)
    h = min(h, max_step)
    t = t0
    K = np.empty((7, len(y)))
    rejected_last = False
    for _ in range(tol.max_steps):
        if t >= t1:
            return pack()
        min_step = 10 * np.spacing(max(abs(t), 1.0))
        if h < min_step:
            raise SingularityError(f"step size underflow at t={t!r}", pack())
        if t + h > t1 or t1 - (t + h) < min_step:
            h = t1 - t

        K[0] = f
        for s in range(1, 6):
            K[s] = field(t + _C[s] * h, y + h * (np.asarray(_A[s]) @ K[:s]))
        y_new = y + h * (_B @ K[:6])
        f_new = np.asarray(field(t + h, y_new), dtype=float)
        K[6] = f_new

        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(f_new))):
            h *= 0.25
            rejected_last = True
            continue

        scale = atol + rtol * np.maximum(np.abs(y), np.abs(y_new))
        err = np.sqrt(np.mean((h * (_E @ K) / scale) ** 2))
        if err <= 1.0:
            t_new = t1 if h == t1 - t else t + h
            cs.append(K.T @ _P)
            ts.append(t_new)
            ys.append(y_new)
            t, y, f = t_new, y_new, f_new
            factor = 10.0 if err == 0 else min(10.0, 0.9 * err ** -0.2)
            if rejected_last:
                factor = min(factor, 1.0)
            h = min(h * factor, max_step)
            rejected_last = False
        else:
            h *= max(0.2, 0.9 * err ** -0.2)
            rejected_last = True
    if t >= t1:
        return pack()
    raise BudgetExceededError(f"ODE step budget {tol.max_steps} exhausted at t={t!r}", t)
