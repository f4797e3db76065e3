"""Command-line front end: ``abelwave solve|figures|sweep|verify``.

Exit codes: 0 all checks pass, 1 a verification failed, 2 usage or
configuration error.
"""

from __future__ import annotations

import argparse
import copy
import itertools
import json
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .chiellini import (abel_reduce, detect_k, fisher_powerlaw_solution, fit_linear_constants,
                        linear_closed_form, solve_theorem1, wave_speed_from_k)
from .errors import AbelWaveError, ConfigError
from .lemke import powerlaw_reaction_solution, solve_lemke
from .model import LEMKE_FAMILIES, Family, RCDModel, make_custom_model, make_model
from .numerics import Tolerance, derivative, second_derivative
from .oracle import (VerificationReport, VerifyConfig, profile_residual, shoot_wave_ode,
                     verify)
from .sampling import MarchSettings
from .solution import (ParametricSolution, Route, read_solution_csv, write_profile_csv,
                       write_solution_csv)

EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2

ROUTES = ("auto", "chiellini", "lemke", "closed-form")
SCENARIO_KEYS = {"model", "V_f", "k", "sign", "route", "ic", "theta_range", "xi_window",
                 "march", "tolerance", "options", "verify", "output"}

FIGURE_SETS = {
    "fig1": {"k": 0.25, "alpha": [0.25, 0.5, 0.75, 0.9, 1.0]},
    "fig2": {"alpha": 0.25, "k": [1 / 16, 1 / 8, 1 / 6, 1 / 5, 1 / 3]},
    "fig3": {"V": 2.0, "m": [2.0, 4.0, 6.0, 8.0, 10.0]},
}
FIGURE_V = 1.0  # fig1/fig2 captions leave V open; the u(xi) shape only scales with 1/(V+1)


# --------------------------------------------------------------------------
# scenarios


@dataclass
class Scenario:
    """A validated scenario document."""

    model: RCDModel
    V_f: float
    route: str
    ic: tuple[float, float]
    k: float | None = None
    theta_range: tuple[float, float] | None = None
    xi_window: tuple[float, float] | None = None
    march: MarchSettings = field(default_factory=MarchSettings)
    tolerance: Tolerance = field(default_factory=Tolerance)
    options: dict = field(default_factory=dict)
    verify: VerifyConfig = field(default_factory=VerifyConfig)
    output: dict = field(default_factory=dict)
    doc: dict = field(default_factory=dict)


def _poly(coeffs):
    c = np.asarray(coeffs, dtype=float)
    return lambda u: np.polynomial.polynomial.polyval(np.asarray(u, dtype=float), c)


def _build_model(doc: dict, V_f: float | None) -> RCDModel:
    if not isinstance(doc, dict) or "family" not in doc:
        raise ConfigError("scenario 'model' must be an object with a 'family'")
    fam = doc["family"]
    if fam == Family.Custom.value:
        unknown = set(doc) - {"family", "D", "B", "Q", "interval", "name"}
        if unknown:
            raise ConfigError(f"Custom model: unknown key(s) {sorted(unknown)}")
        try:
            D, B, Q = (_poly(doc[key]) for key in ("D", "B", "Q"))
        except KeyError as exc:
            raise ConfigError(f"Custom model needs polynomial coefficients for {exc}") from None
        lo, hi = doc.get("interval", [-math.inf, math.inf])
        return make_custom_model(D, B, Q, (float(lo), float(hi)), name=doc.get("name", "Custom"))
    unknown = set(doc) - {"family", "params"}
    if unknown:
        raise ConfigError(f"model: unknown key(s) {sorted(unknown)}")
    params = dict(doc.get("params", {}))
    try:
        family = Family(fam)
    except ValueError:
        raise ConfigError(f"unknown model family {fam!r}") from None
    if family in (Family.LinearDQ, Family.PowerLawDQ) and "V_f" not in params and V_f is not None:
        params["V_f"] = V_f
    return make_model(family, params)


def parse_scenario(doc: dict) -> Scenario:
    """Validate a scenario document.

    Raises:
        ConfigError: unknown keys, both or neither of V_f and k, bad route,
            malformed ic or ranges.
    """
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a JSON object")
    unknown = set(doc) - SCENARIO_KEYS
    if unknown:
        raise ConfigError(f"scenario: unknown key(s) {sorted(unknown)}")
    if "model" not in doc:
        raise ConfigError("scenario: missing 'model'")
    has_v, has_k = "V_f" in doc, "k" in doc
    if has_v == has_k:
        raise ConfigError("scenario: give exactly one of 'V_f' or ('k', 'sign')")
    if "sign" in doc and not has_k:
        raise ConfigError("scenario: 'sign' only goes with 'k'")
    route = doc.get("route", "auto")
    if route not in ROUTES:
        raise ConfigError(f"scenario: route must be one of {ROUTES}, got {route!r}")
    ic = doc.get("ic")
    if not (isinstance(ic, (list, tuple)) and len(ic) == 2):
        raise ConfigError("scenario: 'ic' must be [u0, du0]")
    ic = (float(ic[0]), float(ic[1]))

    k = None
    if has_v:
        V_f = float(doc["V_f"])
        model = _build_model(doc["model"], V_f)
    else:
        k = float(doc["k"])
        model = _build_model(doc["model"], None)
        p = model.params
        if "rho" not in p or "D0" not in p:
            raise ConfigError(f"{model.family.value}: 'k' needs a family with rho and D0; give V_f")
        sign = float(doc.get("sign", 1.0))
        V_f = wave_speed_from_k(p["rho"], p["D0"], k, p.get("B0", 0.0), sign)
    if V_f < 0:
        raise ConfigError(f"scenario: wave speed must be >= 0, got V_f={V_f}")

    def pair(key):
        v = doc.get(key)
        if v is None:
            return None
        if not (isinstance(v, (list, tuple)) and len(v) == 2):
            raise ConfigError(f"scenario: '{key}' must be [lo, hi]")
        return (float(v[0]), float(v[1]))

    def section(key, cls):
        sub = doc.get(key, {})
        if not isinstance(sub, dict):
            raise ConfigError(f"scenario: '{key}' must be an object")
        bad = set(sub) - set(cls.__dataclass_fields__)
        if bad:
            raise ConfigError(f"scenario.{key}: unknown key(s) {sorted(bad)}")
        try:
            return cls(**sub)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"scenario.{key}: {exc}") from None

    return Scenario(model=model, V_f=V_f, route=route, ic=ic, k=k,
                    theta_range=pair("theta_range"), xi_window=pair("xi_window"),
                    march=section("march", MarchSettings),
                    tolerance=section("tolerance", Tolerance),
                    options=dict(doc.get("options", {})),
                    verify=section("verify", VerifyConfig),
                    output=dict(doc.get("output", {})), doc=doc)


def load_json(path) -> dict:
    try:
        with open(path) as fh:
            return json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from None


# --------------------------------------------------------------------------
# solving


class RouteFailure(AbelWaveError):
    """The requested route does not apply to the model (verification failure, exit 1)."""


def closed_form_solution(model: RCDModel, V_f: float, ic, xi_window=(0.0, 5.0),
                         n: int = 501) -> ParametricSolution:
    """The constant-coefficient closed form sampled on a uniform xi grid (parameter = xi)."""
    if model.family is not Family.LinearQ:
        raise ConfigError("route 'closed-form' needs the LinearQ family")
    c = fit_linear_constants(model.params, V_f, ic)
    u_of = lambda x: linear_closed_form(model.params, V_f, c.C, c.xi0, x)
    h = 1e-3 * max(1.0, abs(xi_window[1] - xi_window[0]))
    du = lambda x: derivative(u_of, x, h)
    grid = np.linspace(xi_window[0], xi_window[1], n)
    return ParametricSolution(Route.ClosedForm, "xi", grid, grid, u_of(grid),
                              {"C": c.C, "xi0": c.xi0, "Delta2": c.Delta2, "V_f": V_f},
                              model, V_f, u_of, lambda x: 1.0, du, ic=tuple(ic),
                              xi_of=lambda x: x, d2u=lambda x: second_derivative(u_of, x, h))


def _rescaled(sol: ParametricSolution, model: RCDModel, V: float) -> ParametricSolution:
    """Map a solution of the xi(V+1) equation back to the original xi."""
    s = 1.0 / (V + 1.0)
    xi_of = None if sol.xi_of is None else (lambda t: s * sol.xi_of(t))
    out = ParametricSolution(sol.route, sol.param, sol.t, s * sol.xi, sol.u,
                             dict(sol.constants), model, V, sol.u_of,
                             lambda t: s * sol.dxi_dt(t), sol.du_dt,
                             None if sol.ic is None else (sol.ic[0], sol.ic[1] / s),
                             xi_of, None, list(sol.notes),
                             lambda t: sol.d2u(t) / (s * s), None)
    return out


def _powerlaw_reaction(sc: Scenario) -> ParametricSolution:
    p = sc.model.params
    V = sc.V_f
    if not (p["D0"] == 1.0 and p["B0"] == 1.0 and p["A"] == 1.0):
        raise ConfigError("PowerLawReaction: the exact solution is for D0 = B0 = A = 1")
    if abs(p["lambda"] - (V + 1.0) ** 2) > 1e-9 * max(1.0, p["lambda"]):
        raise ConfigError(f"PowerLawReaction: the exact solution needs lambda = (V_f+1)^2 "
                          f"= {(V + 1.0) ** 2}, got {p['lambda']}")
    s = V + 1.0
    raw = powerlaw_reaction_solution(p["m"], V, (sc.ic[0], sc.ic[1] / s), sc.theta_range,
                                     sc.tolerance, sc.march)
    sol = _rescaled(raw, sc.model, V)
    from .lemke import fin_residual

    sol.constants["fin_residual_rel"] = max(
        (fin_residual(raw, t, relative=True) for t in raw.t[1:-1]), default=0.0)
    return sol


def pick_route(sc: Scenario):
    """Resolve 'auto' and return (route, certificate or None)."""
    route = sc.route
    cert = None
    if route in ("auto", "chiellini"):
        try:
            cert = detect_k(abel_reduce(sc.model, sc.V_f))
        except (AbelWaveError, ValueError):
            cert = None
        if cert is not None:
            return "chiellini", cert
        if route == "chiellini":
            raise RouteFailure("no Chiellini k: the integrability condition fails for this model")
        if sc.model.family in LEMKE_FAMILIES:
            return "lemke", None
        if sc.model.family is Family.LinearQ:
            return "closed-form", None
        raise ConfigError("route 'auto': no Chiellini k and no Lemke case for "
                          f"{sc.model.family.value}")
    if route == "lemke" and sc.model.family not in LEMKE_FAMILIES:
        raise ConfigError(f"route 'lemke' needs a Lemke case family, got {sc.model.family.value}")
    return route, cert


def solve_scenario(sc: Scenario) -> ParametricSolution:
    route, cert = pick_route(sc)
    if route == "chiellini":
        sol = solve_theorem1(sc.model, sc.V_f, cert, sc.ic, sc.theta_range, sc.tolerance,
                             sc.march)
    elif route == "lemke":
        if sc.model.family is Family.PowerLawReaction:
            sol = _powerlaw_reaction(sc)
        else:
            opts = dict(sc.options)
            if sc.theta_range is not None:
                opts.setdefault("theta_range" if sc.model.family in (
                    Family.InverseDQ, Family.PowerLawDQ) else "eta_range", sc.theta_range)
            sol = solve_lemke(sc.model, sc.V_f, sc.ic, sc.tolerance, sc.march, **opts)
    else:
        sol = closed_form_solution(sc.model, sc.V_f, sc.ic, sc.xi_window or (0.0, 5.0))
    if sc.xi_window is not None and route != "closed-form":
        sol = sol.window(*sc.xi_window)
    return sol


def _report_doc(sc: Scenario, sol: ParametricSolution | None, rep: VerificationReport | None,
                error: str | None = None) -> dict:
    doc = {"family": sc.model.family.value, "V_f": sc.V_f, "route_requested": sc.route,
           "ic": list(sc.ic)}
    if sol is not None:
        doc.update({"route": sol.route.value, "k": sol.constants.get("k"), "samples": len(sol)})
    if rep is not None:
        doc["verification"] = rep.to_dict()
        doc["passed"] = rep.passed
    else:
        doc["passed"] = False
    if error:
        doc["error"] = error
    return doc


def _write_json(path, doc) -> None:
    from .oracle import _finite_json

    with open(path, "w") as fh:
        fh.write(json.dumps(_finite_json(doc), indent=2, sort_keys=True) + "\n")


def run_solve(scenario_path) -> int:
    doc = load_json(scenario_path)
    sc = parse_scenario(doc)
    stem = Path(scenario_path).with_suffix("")
    csv_path = Path(sc.output.get("solution", f"{stem}.solution.csv"))
    rep_path = Path(sc.output.get("report", f"{stem}.report.json"))
    for p in (csv_path, rep_path):
        if not p.parent.exists():
            raise ConfigError(f"output directory {p.parent} does not exist")
    try:
        sol = solve_scenario(sc)
    except RouteFailure as exc:
        _write_json(rep_path, _report_doc(sc, None, None, str(exc)))
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    rep = verify(sol, sol.model, sol.V_f, sc.verify)
    if "fin_residual_rel" in sol.constants:
        rep.details["fin_residual_rel"] = sol.constants["fin_residual_rel"]
        rep.flags["lemke_equation"] = bool(sol.constants["fin_residual_rel"] <= sc.verify.fin_tol)
    write_solution_csv(csv_path, sol, {"ic": list(sc.ic)})
    _write_json(rep_path, _report_doc(sc, sol, rep))
    print(f"{csv_path}: {len(sol)} samples, route {sol.route.value}; "
          f"{'all checks pass' if rep.passed else 'FAILED: ' + _failed(rep)}")
    return EXIT_OK if rep.passed else EXIT_FAIL


def _failed(rep: VerificationReport) -> str:
    return ", ".join(k for k, v in rep.flags.items() if not v)


# --------------------------------------------------------------------------
# verify


def run_verify(csv_path, scenario_path) -> int:
    """Rebuild the solution from the scenario and check the CSV samples against it."""
    sc = parse_scenario(load_json(scenario_path))
    header, theta, xi, u = read_solution_csv(csv_path)
    if len(theta) < sc.verify.min_samples:
        raise ConfigError(f"{csv_path}: {len(theta)} samples; need at least "
                          f"{sc.verify.min_samples}")
    try:
        ref = solve_scenario(sc)
    except RouteFailure as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return EXIT_FAIL
    if not np.all(np.diff(xi) > 0):
        print("verification failed: xi column is not increasing", file=sys.stderr)
        return EXIT_FAIL
    u_ref = np.array([ref.u_of(t) for t in theta])
    scale = max(1.0, float(np.max(np.abs(u_ref))))
    u_dev = float(np.max(np.abs(u - u_ref))) / scale
    xi_dev = math.nan
    if ref.xi_of is not None:
        xi_ref = np.array([ref.xi_of(t) for t in theta])
        xi_dev = float(np.max(np.abs(xi - xi_ref))) / max(1.0, float(np.max(np.abs(xi_ref))))
    sol = ref.replace_samples(theta, xi, u)
    rep = verify(sol, sol.model, sol.V_f, sc.verify, samples=(theta[1:-1], u[1:-1]))
    rep.details.update({"csv_u_dev": u_dev, "csv_xi_dev": xi_dev})
    rep.flags["csv_matches_scenario"] = bool(u_dev <= 1e-9 and not xi_dev > 1e-7)
    out = Path(csv_path).with_suffix(".verify.json")
    _write_json(out, _report_doc(sc, sol, rep))
    print(f"{out}: {'all checks pass' if rep.passed else 'FAILED: ' + _failed(rep)}")
    return EXIT_OK if rep.passed else EXIT_FAIL


# --------------------------------------------------------------------------
# figures


def _monotone_to_zero(u: np.ndarray, top: float = 0.98, half: float = 0.5) -> bool:
    """Starts near 1, decreases strictly, stays positive and passes below ``half``."""
    return bool(u[0] >= top and np.all(np.diff(u) < 0) and u[-1] > 0 and u[-1] <= half)


def fk_reference(V: float, eps: float, delta: float, xi_max: float, scale: float = 1.0,
                 n: int = 2001):
    """Fisher-Kolmogorov travelling wave shot from (1 - eps, -delta).

    In the dimensionless frame of the figures (B = 1) the wave moving at V
    obeys u'' + (V+1) u' + u(1-u) = 0. With ``scale`` = 1/(V+1) the curve is
    expressed in the variable xi (V+1) instead: u'' + u' + scale^2 u(1-u) = 0.
    """
    a, b = (V + 1.0) * scale, scale * scale
    const = lambda c: (lambda u: c + 0.0 * np.asarray(u, dtype=float))
    model = make_custom_model(const(1.0), const(a - V),
                              lambda u: b * np.asarray(u) * (1.0 - np.asarray(u)),
                              name="FisherKolmogorov")
    prof = shoot_wave_ode(model, V, (1.0 - eps, -delta), (0.0, xi_max), n=n)
    return model, prof


FIGURE_XI_MAX = {"fig1": 40.0, "fig2": 40.0, "fig3": 120.0}


def run_figures(which: str, eps: float = 1e-3, delta: float = 1e-3, out_dir=".",
                xi_max: float | None = None) -> int:
    if which not in FIGURE_SETS:
        raise ConfigError(f"figure set must be one of {sorted(FIGURE_SETS)}")
    if not (0 < eps < 1 and delta > 0):
        raise ConfigError("need 0 < eps < 1 and delta > 0")
    out = Path(out_dir)
    if not out.is_dir():
        raise ConfigError(f"output directory {out} does not exist")
    fs = FIGURE_SETS[which]
    xi_max = FIGURE_XI_MAX[which] if xi_max is None else float(xi_max)
    if not xi_max > 0:
        raise ConfigError("xi_max must be positive")
    ic = (1.0 - eps, -delta)
    common = {"figure": which, "eps": eps, "delta": delta, "ic": list(ic)}
    ok = True
    march = MarchSettings(xi_max=xi_max * 1.5)
    curves = []
    if which == "fig3":
        V = fs["V"]
        for m in fs["m"]:
            sol = powerlaw_reaction_solution(m, V, ic, settings=march)
            curves.append((f"m_{m:g}", {"m": m, "V": V}, sol))
        fk_scale = 1.0 / (V + 1.0)
    else:
        V = FIGURE_V
        pairs = ([(fs["k"], a) for a in fs["alpha"]] if which == "fig1"
                 else [(k, fs["alpha"]) for k in fs["k"]])
        for k, a in pairs:
            sol = fisher_powerlaw_solution(a, k, V, ic, settings=march)
            label = f"alpha_{a:g}" if which == "fig1" else f"k_{k:.6g}"
            curves.append((label, {"alpha": a, "k": k, "V": V}, sol))
        fk_scale = 1.0
    for label, meta, sol in curves:
        win = sol.window(0.0, xi_max)
        rep = verify(win, win.model, win.V_f, VerifyConfig(shoot_span=min(5.0, xi_max)))
        mono = _monotone_to_zero(win.u)
        passed = rep.flags["residual"] and mono
        ok &= passed
        write_solution_csv(out / f"{which}_{label}.csv", win,
                           {**common, **meta, "monotone": mono,
                            "residual_rel_max": rep.residual_rel_max})
        print(f"{which} {label}: {len(win)} samples, residual {rep.residual_rel_max:.2e}, "
              f"monotone {mono}")
    model, prof = fk_reference(V, eps, delta, xi_max, fk_scale)
    res = profile_residual(prof, model, V)
    mono = _monotone_to_zero(prof.u_values)
    ok &= bool(res <= 1e-6) and mono
    write_profile_csv(out / f"{which}_fk_reference.csv", prof,
                      {**common, "equation": "u_t = u_xx + u(1-u)", "V": V,
                       "xi_scale": fk_scale, "residual_rel_max": res, "monotone": mono})
    print(f"{which} fk_reference: residual {res:.2e}, monotone {mono}")
    return EXIT_OK if ok else EXIT_FAIL


# --------------------------------------------------------------------------
# sweep


def _set_path(doc: dict, dotted: str, value):
    keys = dotted.split(".")
    cur = doc
    for key in keys[:-1]:
        cur = cur.setdefault(key, {})
        if not isinstance(cur, dict):
            raise ConfigError(f"sweep: {dotted!r} does not address an object field")
    cur[keys[-1]] = value


def _run_cell(base: dict, overrides: dict) -> dict:
    row = {"overrides": overrides, "k": None, "V_f": None, "residual_max": None,
           "residual_rel_max": None, "oracle_l2": None, "front_speed": None,
           "flags": {}, "passed": False, "error": ""}
    try:
        doc = copy.deepcopy(base)
        for key, val in overrides.items():
            _set_path(doc, key, val)
        sc = parse_scenario(doc)
        row["V_f"] = sc.V_f
        sol = solve_scenario(sc)
        rep = verify(sol, sol.model, sol.V_f, sc.verify)
        row.update({"k": sol.constants.get("k"), "residual_max": rep.residual_max,
                    "residual_rel_max": rep.residual_rel_max, "oracle_l2": rep.oracle_l2,
                    "front_speed": rep.front_speed, "flags": rep.flags,
                    "passed": rep.passed})
    except (AbelWaveError, ValueError, ArithmeticError) as exc:
        row["error"] = f"{type(exc).__name__}: {exc}"
    return row


def _fmt_cell(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    if isinstance(v, (dict, list)):
        return '"' + json.dumps(v, sort_keys=True).replace('"', '""') + '"'
    text = str(v)
    return '"' + text.replace('"', '""') + '"' if ("," in text or '"' in text) else text


def max_workers(n_tasks: int) -> int:
    cap = os.environ.get("ABELWAVE_THREADS")
    if cap is not None:
        try:
            cap = int(cap)
        except ValueError:
            raise ConfigError(f"ABELWAVE_THREADS must be an integer, got {cap!r}") from None
        if cap < 1:
            raise ConfigError("ABELWAVE_THREADS must be >= 1")
    else:
        cap = os.cpu_count() or 1
    return max(1, min(cap, n_tasks))


def run_sweep(grid_path) -> int:
    """Cartesian product of ``grid`` overrides applied to ``base``; one summary row per run."""
    doc = load_json(grid_path)
    unknown = set(doc) - {"base", "grid", "output"}
    if unknown or "base" not in doc:
        raise ConfigError("sweep file needs 'base' (a scenario) and 'grid'; "
                          f"unknown key(s) {sorted(unknown)}")
    grid = doc.get("grid", {})
    if not isinstance(grid, dict) or not all(isinstance(v, list) for v in grid.values()):
        raise ConfigError("sweep 'grid' must map dotted keys to lists")
    keys = list(grid)
    cells = ([dict(zip(keys, combo)) for combo in itertools.product(*grid.values())]
             if keys and all(grid.values()) else [])
    out = Path(doc.get("output", str(Path(grid_path).with_suffix("")) + ".summary.csv"))
    if cells:
        workers = max_workers(len(cells))
        if workers == 1:
            rows = [_run_cell(doc["base"], c) for c in cells]
        else:
            with ProcessPoolExecutor(max_workers=workers) as pool:
                rows = list(pool.map(_run_cell, [doc["base"]] * len(cells), cells))
    else:
        rows = []
    cols = ["index", "overrides", "k", "V_f", "residual_max", "residual_rel_max", "oracle_l2",
            "front_speed", "passed", "flags", "error"]
    lines = [f"# sweep: {json.dumps(str(grid_path))}", f"# cells: {len(rows)}", ",".join(cols)]
    for i, r in enumerate(rows):
        r = {**r, "index": i}
        lines.append(",".join(_fmt_cell(r[c]) if c != "index" else str(i) for c in cols))
    with open(out, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
    n_pass = sum(r["passed"] for r in rows)
    print(f"{out}: {n_pass}/{len(rows)} runs pass")
    return EXIT_OK if n_pass == len(rows) else EXIT_FAIL


# --------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="abelwave",
                                 description="Exact travelling waves of reaction-convection-"
                                             "diffusion equations.")
    sub = ap.add_subparsers(dest="command", required=True)
    p = sub.add_parser("solve", help="solve a scenario and verify the result")
    p.add_argument("scenario")
    p = sub.add_parser("figures", help="emit the curve bundle of a figure")
    p.add_argument("which", choices=sorted(FIGURE_SETS))
    p.add_argument("--eps", type=float, default=1e-3, help="U(0) = 1 - eps")
    p.add_argument("--delta", type=float, default=1e-3, help="U'(0) = -delta")
    p.add_argument("--out", default=".", help="output directory")
    p.add_argument("--xi-max", type=float, default=None,
                   help="right end of the xi window (default 40; 120 for fig3, whose "
                        "variable is xi (V+1))")
    p = sub.add_parser("sweep", help="run a parameter grid")
    p.add_argument("grid")
    p = sub.add_parser("verify", help="check a solution CSV against its scenario")
    p.add_argument("solution")
    p.add_argument("scenario")
    return ap


def main(argv=None) -> int:
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    try:
        if args.command == "solve":
            return run_solve(args.scenario)
        if args.command == "figures":
            return run_figures(args.which, args.eps, args.delta, args.out, args.xi_max)
        if args.command == "sweep":
            return run_sweep(args.grid)
        return run_verify(args.solution, args.scenario)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except AbelWaveError as exc:
        print(f"failed: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
