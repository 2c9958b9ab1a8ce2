"""Centred finite differences with one Richardson extrapolation."""

from __future__ import annotations

from typing import Callable

import numpy as np


def central_difference(fn: Callable, t, h: float) -> np.ndarray:
    """First derivative of ``fn`` at ``t``, fourth-order accurate in ``h``.

    Combines the centred quotients with steps ``h`` and ``h/2``; ``fn`` must
    accept arrays and be defined on ``[t - h, t + h]``.
    """
    t = np.asarray(t, dtype=float)
    d1 = (fn(t + h) - fn(t - h)) / (2.0 * h)
    d2 = (fn(t + 0.5 * h) - fn(t - 0.5 * h)) / h
    return (4.0 * d2 - d1) / 3.0
