"""Command-line front end.

Subcommands: ``mylar``, ``solve``, ``implicit``, ``assemble``, ``sweep`` and
``validate``. Exit codes: 0 success, 1 computational failure, 2 I/O
failure, 64 usage error.
"""

from __future__ import annotations

import argparse
import math
import sys
from typing import Sequence

import numpy as np

from . import formats
from .assembly import (
    ArcSpec,
    assemble_cross_section,
    build_arc,
    family_coordinate,
    family_params,
    pole_corner_angle,
    shoot_nu,
    shoot_nu_for_pole_curvature,
    sweep_family,
)
from .curvegeom import reconstruct_from_curvature, total_turning
from .errors import DomainError, InflatedError, NoSolutionError, UsageError
from .mylar import (
    linear_curvature,
    mylar_profile,
    mylar_report,
    mylar_volume,
    paulsen_arclength,
    verify_mylar_end_to_end,
)
from .numerics import DEFAULT_TOL, Tolerances, integrate_adaptive
from .profile_ode import ProfileParams, implicit_state, solve_ivp
from .symmetry_system import residuals
from .validation import DEFAULT_SUITE_TOL, run_suite

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_IO = 2
EXIT_USAGE = 64

SWEEP_COLUMNS = ("index", "nu", "pole_angle", "pole_curvature", "width", "height", "area",
                 "closure_gap", "turning_plus_corners", "status")

# Parameters that must come from the command line or the config file.
REQUIRED = {
    "mylar": ("a",),
    "solve": ("k0", "lam", "L"),
    "implicit": ("lam", "mu", "L"),
    "assemble": ("L",),
    "sweep": ("L",),
    "validate": (),
}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _positive_float(text: str) -> float:
    v = float(text)
    if not (v > 0 and math.isfinite(v)):
        raise argparse.ArgumentTypeError(f"must be positive and finite, got {text}")
    return v


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"must be a positive integer, got {text}")
    return v


def _bool(text: str) -> bool:
    t = text.strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise argparse.ArgumentTypeError(f"not a boolean: {text}")


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", default="-", help="output file ('-' for stdout)")
    common.add_argument("--format", choices=("csv", "json", "svg"), default="csv")
    common.add_argument("--config", help="file of key=value lines; flags override it")
    common.add_argument("--abs-tol", type=_positive_float, default=DEFAULT_TOL.abs_tol)
    common.add_argument("--rel-tol", type=_positive_float, default=DEFAULT_TOL.rel_tol)
    common.add_argument("--max-steps", type=_positive_int, default=DEFAULT_TOL.max_steps)

    parser = _Parser(prog="inflated", description="Profiles of inflated surfaces.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("mylar", parents=[common], help="Paulsen profile of the mylar balloon")
    p.add_argument("--a", type=_positive_float, help="inflated radius")
    p.add_argument("--samples", type=int, default=100)

    p = sub.add_parser("solve", parents=[common], help="integrate the curvature ODE")
    p.add_argument("--k0", type=float)
    p.add_argument("--kp0", type=float, default=0.0)
    p.add_argument("--lam", type=float)
    p.add_argument("--L", type=_positive_float)
    p.add_argument("--samples", type=int, default=101)

    p = sub.add_parser("implicit", parents=[common], help="invert the implicit solution")
    p.add_argument("--lam", type=float)
    p.add_argument("--mu", type=float)
    p.add_argument("--L", type=_positive_float)
    p.add_argument("--samples", type=int, default=101)

    p = sub.add_parser("assemble", parents=[common], help="close a cross-section from arcs")
    p.add_argument("--n-arcs", type=int, default=2)
    p.add_argument("--L", type=_positive_float, help="quarter-arc length")
    target = p.add_mutually_exclusive_group()
    target.add_argument("--target-angle", type=float, help="pole exterior angle (radians)")
    target.add_argument("--pole-curvature", type=float)
    p.add_argument("--lam-hat", type=float, default=0.0, help="shape constant lam/k_eq^2")
    p.add_argument("--samples", type=int, default=65, help="samples per quarter arc")

    p = sub.add_parser("sweep", parents=[common], help="tabulate the family over nu")
    p.add_argument("--L", type=_positive_float)
    p.add_argument("--nu", help="comma-separated grid")
    p.add_argument("--nu-min", type=_positive_float)
    p.add_argument("--nu-max", type=_positive_float)
    p.add_argument("--count", type=_positive_int)
    p.add_argument("--n-fold", type=int, default=2)
    p.add_argument("--lam-hat", type=float, default=0.0)
    p.add_argument("--workers", type=_positive_int, default=1)

    p = sub.add_parser("validate", parents=[common], help="run the self-check suite")
    p.add_argument("--tol", type=_positive_float, default=DEFAULT_SUITE_TOL)
    p.add_argument("--inject-fault", action="store_true", help=argparse.SUPPRESS)
    return parser


def _subparser(parser: argparse.ArgumentParser, command: str) -> argparse.ArgumentParser:
    for action in parser._actions:
        if isinstance(action, argparse._SubParsersAction):
            return action.choices[command]
    raise KeyError(command)


def _read_config(path: str) -> dict[str, str]:
    values = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, 1):
            line = raw.strip()
            if not line or line.startswith("#"):
                continue
            if "=" not in line:
                raise UsageError(f"{path}:{lineno}: expected key=value")
            key, value = line.split("=", 1)
            values[key.strip().replace("-", "_")] = value.strip()
    return values


def _apply_config(sub: argparse.ArgumentParser, config: dict[str, str]) -> None:
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, text in config.items():
        action = actions.get(key)
        if action is None or key in ("help", "config"):
            sub.error(f"unknown config key {key!r}")
        try:
            if isinstance(action, argparse._StoreTrueAction):
                defaults[key] = _bool(text)
            elif action.type is not None:
                defaults[key] = action.type(text)
            else:
                defaults[key] = text
        except (ValueError, argparse.ArgumentTypeError) as exc:
            sub.error(f"config key {key}: {exc}")
        if action.choices is not None and defaults[key] not in action.choices:
            sub.error(f"config key {key}: {text!r} not in {sorted(action.choices)}")
    sub.set_defaults(**defaults)


def parse_args(argv: Sequence[str] | None) -> argparse.Namespace:
    parser = build_parser()
    args = parser.parse_args(argv)
    sub = _subparser(parser, args.command)
    if args.config:
        try:
            config = _read_config(args.config)
        except OSError as exc:
            sub.exit(EXIT_IO, f"inflated: cannot read config {args.config}: {exc.strerror}\n")
        except UsageError as exc:
            sub.error(str(exc))
        _apply_config(sub, config)
        args = parser.parse_args(argv)
    for name in REQUIRED[args.command]:
        if getattr(args, name) is None:
            sub.error(f"--{name.replace('_', '-')} is required (flag or config key)")
    _check_ranges(sub, args)
    return args


def _check_ranges(sub: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if hasattr(args, "samples") and args.samples < 2:
        sub.error("--samples must be >= 2")
    if args.command == "assemble":
        if args.n_arcs < 2:
            sub.error("--n-arcs must be >= 2")
        if args.target_angle is None and args.pole_curvature is None:
            sub.error("one of --target-angle and --pole-curvature is required")
    if args.command == "sweep":
        if args.n_fold < 2:
            sub.error("--n-fold must be >= 2")
        if args.nu is None and None in (args.nu_min, args.nu_max, args.count):
            sub.error("give --nu or all of --nu-min, --nu-max, --count")
        if args.format == "svg":
            sub.error("sweep writes csv or json")
    if args.command == "mylar" and args.a is not None and not args.a > 0:
        sub.error("--a must be positive")


def _tolerances(args) -> Tolerances:
    return Tolerances(args.abs_tol, args.rel_tol, args.max_steps)


# -- documents ------------------------------------------------------------


class Document:
    """Samples plus report/residual blocks, rendered per output format."""

    def __init__(self, params, samples, report, residuals, polylines=None,
                 columns=formats.SAMPLE_COLUMNS):
        self.params = params
        self.samples = samples
        self.report = report
        self.residuals = residuals
        self.polylines = polylines
        self.columns = columns

    def render(self, fmt: str) -> str:
        if fmt == "json":
            return formats.render_json({
                "params": self.params,
                "samples": [list(r) for r in self.samples],
                "report": self.report,
                "residuals": self.residuals,
            })
        if fmt == "svg":
            return formats.render_svg(self.polylines)
        preamble = {**self.params, **self.report,
                    **{f"residual_{k}": v for k, v in self.residuals.items()}}
        return formats.render_csv(self.columns, self.samples, preamble)


def _rows(t, k, kp, x, y, theta):
    return [tuple(float(v) for v in r) for r in zip(t, k, kp, x, y, theta)]


def cmd_mylar(args) -> Document:
    a, tol = args.a, _tolerances(args)
    prof = mylar_profile(a, args.samples, tol)
    x = prof.x
    t = np.array([paulsen_arclength(float(xi), a, tol) for xi in x])
    # Tangent angle of the graph walked from the pole: theta = -atan(x^2/sqrt(a^4-x^4)).
    root = np.sqrt(np.maximum((a - x) * (a + x) * (a * a + x * x), 0.0))
    theta = -np.arctan2(x * x, root)
    k = linear_curvature(x, a)
    kp = -2.0 / (a * a) * np.cos(theta)
    rep = mylar_report(a, tol)
    vol = mylar_volume(a, tol)
    check = verify_mylar_end_to_end(a, tol)
    polylines = [np.column_stack([arc.x, arc.y]) for arc in check.section.arcs]
    return Document(
        {"a": a, "lam": 0.0, "mu": 16.0 / a**4},
        _rows(t, k, kp, x, prof.f, theta),
        {"r": rep.flat_radius, "thickness": rep.thickness, "volume": rep.volume,
         "equator_curvature": rep.equator_k, "a_over_r": a / rep.flat_radius},
        {"volume_route_gap": abs(vol.nested - vol.swapped),
         "ode_max_deviation": check.max_deviation,
         "equator_kprime": abs(check.equator_kp),
         "closure_gap": check.closure.endpoint_gap},
        polylines,
    )


def _trajectory_document(params_block, report, t, k, kp, curve, extra_residuals):
    x, y, theta = curve.at(t)
    return Document(
        params_block, _rows(t, k, kp, x, y, theta), report, extra_residuals,
        [np.column_stack([x, y])],
    )


def cmd_solve(args) -> Document:
    tol = _tolerances(args)
    traj = solve_ivp(args.k0, args.kp0, args.lam, args.L, tol)
    curve = reconstruct_from_curvature(traj.k, args.L, tol=tol)
    t = np.linspace(0.0, args.L, args.samples)
    k, kp, kpp = traj.k(t), traj.kp(t), traj.kpp(t)
    q = k * kpp - kp**2 + 0.25 * k**4
    ode = k * traj.kppp(t) - kp * kpp + k**3 * kp
    sym = residuals(traj, 64)
    p = traj.params
    turning = p.turning_curvature()
    return _trajectory_document(
        {"k0": args.k0, "kp0": args.kp0, "lam": args.lam, "L": args.L},
        {"mu": p.mu, "Q": p.Q, "turning_curvature": math.nan if turning is None else turning,
         "total_turning": total_turning(curve)},
        t, k, kp, curve,
        {"q_drift": float(np.max(np.abs(q - p.Q))),
         "ode_residual": float(np.max(np.abs(ode))),
         "gauss": sym.gauss_max, "codazzi": sym.codazzi_max,
         "conservation": sym.conservation_max},
    )


def _hermite(t: np.ndarray, k: np.ndarray, kp: np.ndarray):
    """Cubic Hermite interpolant through ``(t, k, k')``."""
    def f(tq):
        tq = float(tq)
        i = int(np.clip(np.searchsorted(t, tq) - 1, 0, len(t) - 2))
        h = t[i + 1] - t[i]
        s = (tq - t[i]) / h
        h00, h10 = 2 * s**3 - 3 * s**2 + 1, s**3 - 2 * s**2 + s
        h01, h11 = -2 * s**3 + 3 * s**2, s**3 - s**2
        return h00 * k[i] + h10 * h * kp[i] + h01 * k[i + 1] + h11 * h * kp[i + 1]
    return f


def cmd_implicit(args) -> Document:
    tol = _tolerances(args)
    p = ProfileParams(args.lam, args.mu)
    t = np.linspace(0.0, args.L, args.samples)
    states = [implicit_state(float(ti), p, tol) for ti in t]
    k = np.array([s[0] for s in states])
    kp = np.array([s[1] for s in states])
    curve = reconstruct_from_curvature(_hermite(t, k, kp), args.L, tol=tol)
    ode = solve_ivp(0.0, 0.5 * math.sqrt(p.mu - p.lam**2), p.lam, args.L, tol)
    return _trajectory_document(
        {"lam": args.lam, "mu": args.mu, "L": args.L},
        {"Q": p.Q, "turning_curvature": p.turning_curvature(),
         "total_turning": total_turning(curve)},
        t, k, kp, curve,
        {"ode_agreement": float(np.max(np.abs(ode.k(t) - k)))},
    )


def cmd_assemble(args) -> Document:
    tol = _tolerances(args)
    L, n = args.L, args.n_arcs
    if args.target_angle is not None:
        nu = shoot_nu(L, args.target_angle, tol, n, args.lam_hat)
    else:
        nu = shoot_nu_for_pole_curvature(L, args.pole_curvature, args.lam_hat, tol)
    params = family_params(nu, L, args.lam_hat)
    traj, arc = build_arc(ArcSpec(L, params=params), tol)
    quarter = arc.resampled(args.samples)
    section = assemble_cross_section(quarter, n)

    tq = quarter.t
    kq, kpq = traj.k(tq), traj.kp(tq)
    k_half = np.concatenate([kq[::-1], kq[1:]])
    kp_half = np.concatenate([-kpq[::-1], kpq[1:]])
    rows = []
    for j, copy in enumerate(section.arcs):
        rows += _rows(copy.t + 2.0 * L * j, k_half, kp_half, copy.x, copy.y, copy.theta)
    m = section.metrics()
    angle = pole_corner_angle(arc, n)
    target = args.target_angle
    report = {
        "nu": family_coordinate(params, L), "mu": params.mu,
        "pole_angle": angle, "pole_curvature": float(traj.k(L)),
        "corner_max": max(abs(c) for c in section.corner_exterior_angles),
        **m, "closure_gap": section.closure.endpoint_gap,
        "turning_plus_corners": section.closure.turning_plus_corners,
        "closed": section.ok,
    }
    # Corners measured from the placed curves against 2 pi/n - 2 int k dt.
    turning = integrate_adaptive(traj.k, 0.0, L, tol).value
    predicted = 2.0 * math.pi / n - 2.0 * turning
    res = {"closure_gap": section.closure.endpoint_gap,
           "gauss_bonnet": abs(section.closure.turning_plus_corners - 2.0 * math.pi),
           "corner_vs_curvature_integral": max(
               abs(c - predicted) for c in section.corner_exterior_angles)}
    if target is not None:
        res["angle_error"] = abs(angle - target)
    return Document(
        {"n_arcs": n, "L": L, "lam_hat": args.lam_hat, "lam": params.lam,
         "target_angle": math.nan if target is None else target,
         "pole_curvature_target": math.nan if args.pole_curvature is None
         else args.pole_curvature},
        rows, report, res,
        [np.column_stack([c.x, c.y]) for c in section.arcs],
    )


def _grid(args) -> list[float]:
    if args.nu is not None:
        try:
            grid = [float(v) for v in args.nu.split(",") if v.strip()]
        except ValueError as exc:
            raise UsageError(f"bad --nu list: {exc}") from exc
        if not grid or any(not (v > 0 and math.isfinite(v)) for v in grid):
            raise UsageError("--nu needs positive values")
        return grid
    if args.nu_max < args.nu_min:
        raise UsageError("--nu-max must be >= --nu-min")
    return [float(v) for v in np.linspace(args.nu_min, args.nu_max, args.count)]


def cmd_sweep(args) -> Document:
    tol = _tolerances(args)
    grid = _grid(args)
    rows = sweep_family(grid, args.L, args.n_fold, args.lam_hat, tol, args.workers)
    table = [
        (r.index, r.nu, r.pole_angle, r.pole_curvature, r.width, r.height, r.area,
         r.closure_gap, r.turning_plus_corners, r.status.replace(",", ";").replace("\n", " "))
        for r in rows
    ]
    gaps = [r.closure_gap for r in rows if r.status == "ok"]
    return Document(
        {"L": args.L, "n_fold": args.n_fold, "lam_hat": args.lam_hat, "points": len(grid)},
        table,
        {"failed": sum(r.status != "ok" for r in rows)},
        {"max_closure_gap": max(gaps) if gaps else math.nan},
        columns=SWEEP_COLUMNS,
    )


COMMANDS = {
    "mylar": cmd_mylar,
    "solve": cmd_solve,
    "implicit": cmd_implicit,
    "assemble": cmd_assemble,
    "sweep": cmd_sweep,
}


def _validate(args) -> int:
    results = run_suite(args.tol, args.inject_fault, report=print)
    passed = sum(c.passed for c in results)
    print(f"{passed}/{len(results)} checks passed")
    sys.stdout.flush()
    return EXIT_OK if passed == len(results) else EXIT_FAILURE


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    if args.command == "validate":
        return _validate(args)
    try:
        doc = COMMANDS[args.command](args)
    except (UsageError, DomainError) as exc:
        print(f"inflated: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NoSolutionError as exc:
        lo, hi = exc.achievable
        print(f"inflated: {type(exc).__name__}: {exc}; achievable range [{lo:.6g}, {hi:.6g}]",
              file=sys.stderr)
        return EXIT_FAILURE
    except InflatedError as exc:
        print(f"inflated: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAILURE
    try:
        formats.write_text(args.out, doc.render(args.format))
    except OSError as exc:
        print(f"inflated: cannot write {args.out}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
