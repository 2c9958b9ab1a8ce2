"""Adaptive Gauss-Kronrod quadrature, plus a variant for inverse-square-root
endpoint singularities.

The singular variant removes a ``(b - u)**-0.5`` blow-up with the
substitution ``u = b - s**2`` (and ``u = a + s**2`` on the left), which turns
the integrand into a smooth function of ``s``; the smooth rule then does the
rest.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np

from ..errors import BudgetExceededError, DivergenceError, UsageError
from .tolerances import DEFAULT_TOL, Tolerances

# 15-point Kronrod abscissae (non-negative half) and weights; the 7-point
# Gauss rule uses the odd-indexed abscissae.
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])

# Full 15-node layout on [-1, 1]: negative half, centre, positive half.
_NODES = np.concatenate([-_XGK[:-1], [0.0], _XGK[-2::-1]])
_KW = np.concatenate([_WGK[:-1], [_WGK[-1]], _WGK[-2::-1]])
_GW = np.zeros(15)
_GW[[1, 3, 5]] = _WG[:3]
_GW[7] = _WG[3]
_GW[[9, 11, 13]] = _WG[2::-1]

_EPS = np.finfo(float).eps


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    error_estimate: float
    evaluations: int


def _evaluate(f: Callable, x: np.ndarray, *extra: np.ndarray) -> np.ndarray:
    """Call ``f`` on arrays of nodes, falling back to a scalar loop."""
    try:
        vals = np.asarray(f(x, *extra), dtype=float)
    except (TypeError, ValueError):
        vals = None
    if vals is None or vals.shape != x.shape:
        if vals is not None and vals.ndim == 0:
            return np.full(x.shape, float(vals))
        vals = np.array([float(f(float(xi), *(float(e[i]) for e in extra)))
                         for i, xi in enumerate(x)])
    return vals


def _gk15(f: Callable, a: float, b: float) -> tuple[float, float, float]:
    """One Gauss-Kronrod 7/15 panel: (value, error estimate, |f| integral)."""
    centre = 0.5 * (a + b)
    half = 0.5 * (b - a)
    fv = _evaluate(f, centre + half * _NODES)
    if not np.all(np.isfinite(fv)):
        raise FloatingPointError(f"non-finite integrand on [{a!r}, {b!r}]")
    resk = float(_KW @ fv)
    resg = float(_GW @ fv)
    mean = 0.5 * resk
    resasc = float(_KW @ np.abs(fv - mean)) * abs(half)
    resabs = float(_KW @ np.abs(fv)) * abs(half)
    err = abs((resk - resg) * half)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    err = max(err, 50.0 * _EPS * resabs)
    return resk * half, err, resabs


def integrate_adaptive(
    f: Callable, a: float, b: float, tol: Tolerances = DEFAULT_TOL
) -> QuadratureResult:
    """Globally adaptive Gauss-Kronrod 7/15 quadrature of ``f`` over ``[a, b]``.

    ``f`` may be vectorised (called with an array of 15 nodes) or scalar.
    Intervals are bisected worst-first until the summed error estimate drops
    below ``max(abs_tol, rel_tol*|value|)`` or a round-off floor.

    Raises:
        BudgetExceededError: the evaluation budget ran out, or the worst
            interval can no longer be bisected in floating point.
    """
    if not b >= a:
        raise UsageError(f"need a <= b, got [{a}, {b}]")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)

    value, err, resabs = _gk15(f, a, b)
    evals = 15
    heap = [(-err, a, b, value, err, resabs)]
    # Running sums keep each refinement O(log n); exact sums confirm exit.
    total, total_err, total_abs = value, err, resabs
    while True:
        if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total), 50.0 * _EPS * total_abs):
            total = math.fsum(item[3] for item in heap)
            total_err = math.fsum(item[4] for item in heap)
            total_abs = math.fsum(item[5] for item in heap)
            floor = 50.0 * _EPS * total_abs
            if total_err <= max(tol.abs_tol, tol.rel_tol * abs(total), floor):
                return QuadratureResult(total, total_err, evals)
        if evals + 30 > tol.max_steps:
            raise BudgetExceededError(
                f"quadrature budget of {tol.max_steps} evaluations exhausted",
                total, total_err)
        _, lo, hi, v0, e0, r0 = heapq.heappop(heap)
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            raise BudgetExceededError(
                f"interval [{lo!r}, {hi!r}] cannot be refined further", total, total_err)
        total, total_err, total_abs = total - v0, total_err - e0, total_abs - r0
        for x0, x1 in ((lo, mid), (mid, hi)):
            try:
                v, e, r = _gk15(f, x0, x1)
            except FloatingPointError as exc:
                raise BudgetExceededError(f"{exc}; refinement stopped", total, total_err) from exc
            heapq.heappush(heap, (-e, x0, x1, v, e, r))
            total, total_err, total_abs = total + v, total_err + e, total_abs + r
        evals += 30


SingularEnd = Literal["left", "right", "both"]


def _blows_up(g: Callable, smax: float) -> bool:
    # After the substitution an admissible integrand stays bounded as s -> 0;
    # anything stronger than an inverse square root grows between the probes.
    probes = _evaluate(g, np.array([1e-3, 1e-5]) * smax)
    if not np.all(np.isfinite(probes)):
        return True
    far, near = abs(probes[0]), abs(probes[1])
    return near > 5.0 * far + 1e-300


def integrate_singular_endpoint(
    f: Callable,
    a: float,
    b: float,
    singular_end: SingularEnd = "right",
    tol: Tolerances = DEFAULT_TOL,
    with_gap: bool = False,
) -> QuadratureResult:
    """Integrate ``f`` over ``[a, b]`` allowing ``(end - u)**-0.5`` blow-up.

    ``f`` is never evaluated at a declared singular end. With
    ``with_gap=True`` it is called as ``f(u, gap)`` where ``gap = |end - u|``
    is passed exactly instead of being recovered from ``u`` by cancellation;
    integrands of the form ``1/sqrt(R(u))`` should use it to keep full
    precision next to the root of ``R``.

    Raises:
        DivergenceError: the integrand grows faster than an inverse square
            root at a declared end, or the transformed problem fails to
            converge.
    """
    if not b >= a:
        raise UsageError(f"need a <= b, got [{a}, {b}]")
    if singular_end not in ("left", "right", "both"):
        raise UsageError(f"singular_end must be left, right or both, got {singular_end!r}")
    if a == b:
        return QuadratureResult(0.0, 0.0, 1)
    if singular_end == "both":
        mid = 0.5 * (a + b)
        half_tol = tol.scaled(0.5)
        left = integrate_singular_endpoint(f, a, mid, "left", half_tol, with_gap)
        right = integrate_singular_endpoint(f, mid, b, "right", half_tol, with_gap)
        return QuadratureResult(
            left.value + right.value,
            left.error_estimate + right.error_estimate,
            left.evaluations + right.evaluations,
        )

    sign = -1.0 if singular_end == "right" else 1.0
    end = b if singular_end == "right" else a

    def g(s):
        s = np.asarray(s, dtype=float)
        gap = s * s
        u = end + sign * gap
        if s.ndim == 0:
            return 2.0 * s * (f(float(u), float(gap)) if with_gap else f(float(u)))
        vals = _evaluate(f, u, gap) if with_gap else _evaluate(f, u)
        return 2.0 * s * vals

    smax = math.sqrt(b - a)
    with np.errstate(divide="ignore", invalid="ignore"):
        diverges = _blows_up(g, smax)
    if diverges:
        raise DivergenceError(
            f"integrand diverges faster than an inverse square root at the {singular_end} end",
            float("inf"))
    try:
        res = integrate_adaptive(g, 0.0, smax, tol)
    except BudgetExceededError as exc:
        raise DivergenceError(f"singular quadrature did not converge: {exc}",
                              exc.best_estimate, exc.error_estimate) from exc
    except FloatingPointError as exc:
        raise DivergenceError(str(exc), float("inf")) from exc
    return QuadratureResult(res.value, res.error_estimate, res.evaluations + 2)
