"""Deterministic CSV, JSON and SVG writers.

Every float is written with 17 significant digits in scientific notation
and lines end in ``\\n``, so identical inputs give byte-identical files.
"""

from __future__ import annotations

import json
import math
import sys
from typing import Any, Mapping, Sequence

import numpy as np

SAMPLE_COLUMNS = ("t", "k", "kprime", "x", "y", "theta")
SVG_SIZE = 1000
SVG_MARGIN = 20


def fmt(v: float) -> str:
    """``1.2345678901234567e+00`` style; non-finite values as ``nan``/``inf``/``-inf``."""
    return format(float(v), ".16e")


def _cell(v: Any) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v)
    return str(v)


def render_csv(columns: Sequence[str], rows, preamble: Mapping[str, Any] | None = None) -> str:
    lines = [f"# {k}={_cell(v)}" for k, v in (preamble or {}).items()]
    lines.append(",".join(columns))
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} cells, header has {len(columns)}")
        lines.append(",".join(_cell(v) for v in row))
    return "\n".join(lines) + "\n"


def _json(v: Any, indent: int) -> str:
    pad, inner = "  " * indent, "  " * (indent + 1)
    if v is None:
        return "null"
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return fmt(v) if math.isfinite(v) else "null"
    if isinstance(v, str):
        return _json_string(v)
    if isinstance(v, Mapping):
        if not v:
            return "{}"
        items = [f"{inner}{_json_string(str(k))}: {_json(x, indent + 1)}" for k, x in v.items()]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(v, np.ndarray):
        v = v.tolist()
    if isinstance(v, (list, tuple)):
        if not v:
            return "[]"
        # Rows of numbers stay on one line.
        if all(not isinstance(x, (Mapping, list, tuple, np.ndarray)) for x in v):
            return "[" + ", ".join(_json(x, indent + 1) for x in v) + "]"
        return "[\n" + ",\n".join(inner + _json(x, indent + 1) for x in v) + "\n" + pad + "]"
    raise TypeError(f"cannot serialise {type(v).__name__}")


def _json_string(s: str) -> str:
    return json.dumps(s)


def render_json(doc: Mapping[str, Any]) -> str:
    """JSON with fixed float formatting; non-finite floats become ``null``."""
    return _json(doc, 0) + "\n"


def render_svg(polylines: Sequence[np.ndarray]) -> str:
    """One ``<polyline>`` per ``(n, 2)`` array, scaled into a fixed square viewBox."""
    pts = np.concatenate([np.asarray(p, dtype=float) for p in polylines])
    lo, hi = pts.min(axis=0), pts.max(axis=0)
    extent = float(max(hi[0] - lo[0], hi[1] - lo[1], 1e-300))
    scale = (SVG_SIZE - 2 * SVG_MARGIN) / extent
    centre = 0.5 * (lo + hi)
    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {SVG_SIZE} {SVG_SIZE}" '
        f'width="{SVG_SIZE}" height="{SVG_SIZE}">',
    ]
    for p in polylines:
        p = np.asarray(p, dtype=float)
        sx = SVG_SIZE / 2 + (p[:, 0] - centre[0]) * scale
        sy = SVG_SIZE / 2 - (p[:, 1] - centre[1]) * scale
        coords = " ".join(f"{a:.6f},{b:.6f}" for a, b in zip(sx, sy))
        lines.append(f'  <polyline fill="none" stroke="black" stroke-width="2" points="{coords}"/>')
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


def write_text(path: str | None, text: str) -> None:
    """Write to ``path``; ``None`` or ``-`` means stdout. Raises ``OSError``."""
    if path in (None, "-"):
        sys.stdout.write(text)
        sys.stdout.flush()
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
