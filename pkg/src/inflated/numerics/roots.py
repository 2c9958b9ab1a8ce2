"""Brent's bracketed root finder."""

from __future__ import annotations

from typing import Callable

from ..errors import BracketError, BudgetExceededError
from .tolerances import DEFAULT_TOL, Tolerances

_EPS = 2.220446049250313e-16


def find_root_bracketed(
    f: Callable[[float], float], lo: float, hi: float, tol: Tolerances = DEFAULT_TOL
) -> float:
    """Root of ``f`` in ``[lo, hi]`` by Brent's method.

    Combines bisection, secant steps and inverse quadratic interpolation.
    Terminates once the bracket is narrower than ``abs_tol`` (plus a few ulps
    of the iterate) or an exact zero is hit.

    Raises:
        BracketError: ``f(lo)`` and ``f(hi)`` have the same strict sign.
        BudgetExceededError: more than ``max_steps`` iterations.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if fa * fb > 0.0:
        raise BracketError(f"no sign change on [{a}, {b}]: f={fa:.3e}, {fb:.3e}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_steps):
        if fb * fc > 0.0:
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb

        tol1 = 2.0 * _EPS * abs(b) + 0.5 * tol.abs_tol
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b

        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0.0:
                q = -q
            p = abs(p)
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m

        a, fa = b, fb
        b += d if abs(d) > tol1 else (tol1 if m > 0 else -tol1)
        fb = f(b)
    raise BudgetExceededError(f"root finding exceeded {tol.max_steps} iterations", b)
