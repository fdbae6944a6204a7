"""Command-line entry point: ``hypervolt {solve,verify,asym,compare,catalog}``.

Output is a table written as CSV (header row, ``.`` decimals, floats in
shortest round-trip form) or JSON (a list of records with the same values).
``solve`` tables have the fixed columns ``t, value, route, err_est`` in
long format, one row per (time, route). Exit status is 0 on success, 2 for
invalid input and 3 when a numeric procedure fails.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass
from itertools import combinations
from typing import Sequence

import numpy as np

from hypervolt.asymptotics import (
    LARGE_T_WINDOW,
    SINGULARITY_BOUND,
    SMALL_T_WINDOW,
    estimate_power_law,
    onset_prediction,
    tail_prediction,
)
from hypervolt.errors import NumericalError, UnsupportedError, ValidationError
from hypervolt.kernel import check_lambda
from hypervolt.profiles import CATALOG, SourceProfile, resolve_profile
from hypervolt.resolvent import (
    HYPER_LAMBDA,
    SolutionGrid,
    inversion_solution,
    resolvent_solution,
    solve_via_inversion,
    solve_via_resolvent,
)
from hypervolt.singular_residual import residual
from hypervolt.transform import InversionConfig
from hypervolt.volterra_direct import StepperConfig, solve_product_integration

__all__ = ["main", "build_parser", "parse_grid", "Grid"]

ROUTES = ("inversion", "resolvent", "direct")
SOLVE_COLUMNS = ("t", "value", "route", "err_est")
STATED_SMALL_T_EXPONENT = -0.25
DEFAULT_STEP = 1e-3
MAX_DIRECT_STEPS = 100_000


@dataclass(frozen=True)
class Grid:
    t_min: float
    t_max: float
    points: int
    spacing: str = "geometric"

    def times(self) -> np.ndarray:
        if self.points == 1:
            return np.array([self.t_min])
        if self.spacing == "geometric":
            return np.geomspace(self.t_min, self.t_max, self.points)
        return np.linspace(self.t_min, self.t_max, self.points)


def parse_grid(text: str) -> Grid:
    """``tmin:tmax:points[:geometric|linear]``; a single point needs tmin == tmax."""
    parts = text.split(":")
    if len(parts) not in (3, 4):
        raise ValidationError(f"grid must be tmin:tmax:points[:spacing], got {text!r}")
    try:
        lo, hi, n = float(parts[0]), float(parts[1]), int(parts[2])
    except ValueError:
        raise ValidationError(f"malformed grid {text!r}") from None
    spacing = parts[3] if len(parts) == 4 else "geometric"
    if spacing not in ("geometric", "linear"):
        raise ValidationError(f"grid spacing must be geometric or linear, got {spacing!r}")
    if not (math.isfinite(lo) and math.isfinite(hi) and lo > 0):
        raise ValidationError("grid needs finite t_min > 0")
    if n == 1:
        if lo != hi:
            raise ValidationError("a one-point grid needs t_min == t_max")
    elif n < 2 or not hi > lo:
        raise ValidationError("grid needs points >= 2 and t_max > t_min")
    return Grid(lo, hi, n, spacing)


# --- route dispatch ----------------------------------------------------------


def _inversion_config(args) -> InversionConfig | None:
    if args.method == "auto":
        if args.nodes is not None or args.contour_scale != 1.0:
            raise ValidationError("--nodes/--contour-scale need an explicit --method")
        return None
    return InversionConfig(args.method, args.nodes, args.contour_scale)


def _routes(args, lam: float) -> list[str]:
    if args.route != "all":
        return [args.route]
    if lam > 0:
        return list(ROUTES)
    if abs(lam - HYPER_LAMBDA) <= 1e-12:
        return ["inversion", "resolvent"]
    return ["inversion"]


def _direct(profile: SourceProfile, lam: float, times: np.ndarray, step: float) -> SolutionGrid:
    """Product integration at ``step`` and ``2 step``; values interpolated to ``times``."""
    t_end = float(times[-1])
    h = min(step, t_end / 16)
    n = math.ceil(t_end / h - 1e-9)
    if n > MAX_DIRECT_STEPS:
        raise ValidationError(
            f"direct route would need {n} steps (> {MAX_DIRECT_STEPS}); increase --step or shorten the grid"
        )
    fine = solve_product_integration(profile, lam, StepperConfig(h, n * h))
    coarse = solve_product_integration(profile, lam, StepperConfig(2 * h, 2 * h * math.ceil(n / 2)))

    def interp(g: SolutionGrid) -> np.ndarray:
        tt = np.concatenate([[0.0], g.times])
        vv = np.concatenate([[profile.value_at_zero], g.values])
        return np.interp(times, tt, vv)

    v = interp(fine)
    method = dict(fine.method)
    return SolutionGrid(times, v, method, np.abs(v - interp(coarse)))


def _solve_route(route: str, profile: SourceProfile, lam: float, times: np.ndarray, args) -> SolutionGrid:
    if route == "inversion":
        return solve_via_inversion(profile, lam, times, _inversion_config(args))
    if route == "resolvent":
        return solve_via_resolvent(profile, lam, times)
    if route == "direct":
        return _direct(profile, lam, times, args.step)
    raise ValidationError(f"unknown route {route!r}")


def _evaluable(route: str, profile: SourceProfile, lam: float, args):
    if route == "inversion":
        return inversion_solution(profile, lam, _inversion_config(args))
    if route == "resolvent":
        return resolvent_solution(profile, lam)
    raise UnsupportedError(f"verify needs a pointwise route (inversion or resolvent), got {route!r}")


# --- commands ----------------------------------------------------------------


def _common(args) -> tuple[float, SourceProfile, np.ndarray]:
    lam = check_lambda(args.lam)
    profile = resolve_profile(args.profile)
    return lam, profile, parse_grid(args.grid).times()


def cmd_solve(args) -> list[dict]:
    lam, profile, times = _common(args)
    rows = []
    for route in _routes(args, lam):
        g = _solve_route(route, profile, lam, times, args)
        err = g.error_estimates if g.error_estimates is not None else np.full(times.shape, math.nan)
        rows += [
            {"t": float(t), "value": float(v), "route": route, "err_est": float(e)}
            for t, v, e in zip(g.times, g.values, err)
        ]
    return rows


def cmd_verify(args) -> list[dict]:
    lam, profile, times = _common(args)
    route = "inversion" if args.route == "all" else args.route
    v = _evaluable(route, profile, lam, args)
    rows = []
    for t in times:
        r = residual(profile, lam, v, t)
        rows.append(
            {
                "t": r.t,
                "value": r.solution_value,
                "residual": r.residual,
                "scaled_residual": abs(r.residual) / (1.0 + abs(r.solution_value)),
                "convolution": r.convolution_value,
                "quad_err": r.quadrature_error_estimate,
                "regularization": r.regularization,
                "route": route,
            }
        )
    return rows


def cmd_asym(args) -> list[dict]:
    lam = check_lambda(args.lam)
    profile = resolve_profile(args.profile)
    cfg = _inversion_config(args)
    rows = []
    regimes = (
        ("small-t", SMALL_T_WINDOW, onset_prediction(profile, lam), STATED_SMALL_T_EXPONENT),
        ("large-t", LARGE_T_WINDOW, tail_prediction(profile, lam), math.nan),
    )
    for regime, window, (amp_pred, nu_pred), stated in regimes:
        times = np.geomspace(window[0], window[1], args.points)
        fit = estimate_power_law(solve_via_inversion(profile, lam, times, cfg, estimate_error=False), window)
        rows.append(
            {
                "regime": regime,
                "t_min": window[0],
                "t_max": window[1],
                "exponent": fit.exponent,
                "amplitude": fit.amplitude,
                "rms_log_residual": fit.rms_log_residual,
                "predicted_exponent": nu_pred,
                "predicted_amplitude": amp_pred,
                "stated_exponent": stated,
                "less_singular_than_kernel": (fit.exponent > SINGULARITY_BOUND) if regime == "small-t" else "",
            }
        )
    return rows


def cmd_compare(args) -> list[dict]:
    lam, profile, times = _common(args)
    grids = {r: _solve_route(r, profile, lam, times, args) for r in _routes(args, lam)}
    if len(grids) < 2:
        raise ValidationError("compare needs at least two routes (use --route all)")
    rows = []
    for a, b in combinations(grids, 2):
        va, vb = grids[a].values, grids[b].values
        diff = np.abs(va - vb)
        scale = np.maximum(np.abs(va), np.abs(vb))
        with np.errstate(divide="ignore", invalid="ignore"):
            rel = np.where(scale > 0, diff / scale, 0.0)
        rows.append(
            {
                "pair": f"{a}-{b}",
                "max_abs": float(diff.max()),
                "rms_abs": float(np.sqrt(np.mean(diff**2))),
                "max_rel": float(rel.max()),
                "points": int(times.size),
            }
        )
    return rows


def cmd_catalog(args) -> list[dict]:
    return [
        {
            "name": p.name,
            "value_at_zero": p.value_at_zero,
            "moment0": p.moment0,
            "decay": p.decay,
            "contour_safe": p.contour_safe,
            "description": p.description,
        }
        for p in CATALOG.values()
    ]


COMMANDS = {
    "solve": cmd_solve,
    "verify": cmd_verify,
    "asym": cmd_asym,
    "compare": cmd_compare,
    "catalog": cmd_catalog,
}


# --- output ------------------------------------------------------------------


def _cell(x) -> str:
    if isinstance(x, bool):
        return "true" if x else "false"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def render_csv(rows: Sequence[dict]) -> str:
    buf = io.StringIO()
    if not rows:
        return ""
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(rows[0].keys())
    for r in rows:
        w.writerow(_cell(v) for v in r.values())
    return buf.getvalue()


def render_json(rows: Sequence[dict], notes: Sequence[str] = ()) -> str:
    def clean(v):
        return None if isinstance(v, float) and not math.isfinite(v) else v

    doc = {"rows": [{k: clean(v) for k, v in r.items()} for r in rows]}
    if notes:
        doc["notes"] = list(notes)
    return json.dumps(doc, indent=2) + "\n"


def _notes(command: str) -> list[str]:
    if command == "asym":
        return [
            "stated_exponent is the commonly quoted small-t law v ~ t^(-1/4), listed for comparison; "
            "predicted_exponent comes from pairing the p -> inf behaviour of the transform "
            "with a time-side power law",
        ]
    return []


# --- argument parsing --------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hypervolt",
        description="Solve v = v0 + int_0^t (t-s)^(lambda-1) v(s) ds and check the results.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def add_output(p):
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--out", default="-", help="output path ('-' for stdout)")

    def add_method(p):
        p.add_argument("--method", choices=("auto", "talbot", "stehfest", "euler"), default="auto")
        p.add_argument("--nodes", type=int, default=None)
        p.add_argument("--contour-scale", type=float, default=1.0)

    def add_problem(p, default_grid: str, routes: Sequence[str], default_route: str = "all"):
        p.add_argument("--lambda", dest="lam", type=float, required=True)
        p.add_argument("--profile", default="exp", help="catalog name or two-column sample file")
        p.add_argument("--grid", default=default_grid, help="tmin:tmax:points[:geometric|linear]")
        p.add_argument("--route", choices=routes, default=default_route)
        p.add_argument("--step", type=float, default=DEFAULT_STEP, help="product-integration step")
        add_method(p)
        add_output(p)

    add_problem(sub.add_parser("solve", help="tabulate the solution"), "0.01:10:20", ROUTES + ("all",))
    add_problem(
        sub.add_parser("verify", help="finite-part residual of a computed solution"),
        "0.5:20:4",
        ("inversion", "resolvent", "all"),
        "inversion",
    )
    add_problem(sub.add_parser("compare", help="pairwise route differences"), "0.01:10:20", ROUTES + ("all",))

    asym = sub.add_parser("asym", help="power-law fits at small and large t")
    asym.add_argument("--lambda", dest="lam", type=float, default=HYPER_LAMBDA)
    asym.add_argument("--profile", default="exp")
    asym.add_argument("--points", type=int, default=25, help="samples per fit window")
    add_method(asym)
    add_output(asym)

    add_output(sub.add_parser("catalog", help="list built-in forcing profiles"))
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        rows = COMMANDS[args.command](args)
    except ValidationError as exc:
        print(f"hypervolt: error: {exc}", file=sys.stderr)
        return 2
    except NumericalError as exc:
        print(f"hypervolt: numerical failure: {exc}", file=sys.stderr)
        return 3
    notes = _notes(args.command)
    if args.format == "json":
        text = render_json(rows, notes)
    else:
        text = render_csv(rows)
        for n in notes:
            print(f"note: {n}", file=sys.stderr)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    return 0


if __name__ == "__main__":
    sys.exit(main())
