"""Acceptance checks, one test per criterion. Each prints a PASS/FAIL line.

Run with ``pytest -s tests/test_acceptance.py`` to see the summary lines.
"""
import math
import time

import numpy as np
import pytest

from abelwave.chiellini import (detect_k, fisher_powerlaw_model, fit_linear_constants,
                                linear_closed_form, solve_theorem1, wave_speed_from_k)
from abelwave.cli import FIGURE_SETS, fk_reference, run_figures
from abelwave.lemke import (case_linear_DQ, fin_residual, inverse_dq_tau_explicit,
                            powerlaw_reaction_b, powerlaw_reaction_solution, solve_lemke)
from abelwave.model import Family, abel_reduce, make_model
from abelwave.numerics import Tolerance, erf, hyp2f1, integrate_ode, quad
from abelwave.oracle import (VerifyConfig, front_speed, pde_evolve, profile_residual,
                             tw_residuals, verify)
from abelwave.solution import WaveProfile, read_solution_csv


def report(n, ok, what):
    print(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {what}")
    assert ok, what


def test_c01_chiellini_detection():
    rng = np.random.default_rng(20261016)
    t0 = time.perf_counter()
    worst = 0.0
    for i in range(50):
        fam = Family.GeneralizedFisher if i % 2 else Family.PowerLawFisher
        p = {"D0": rng.uniform(0.2, 3), "B0": rng.uniform(-0.5, 2), "rho": rng.uniform(0.1, 3),
             "u_max": rng.uniform(0.5, 4), "alpha": rng.uniform(-2, 2)}
        V_f = rng.uniform(0.2, 4) + max(0.0, -p["B0"])
        cert = detect_k(abel_reduce(make_model(fam, p), V_f))
        k_ref = p["rho"] * p["D0"] / (V_f + p["B0"]) ** 2
        worst = max(worst, math.inf if cert is None else abs(cert.k - k_ref) / k_ref)
    dt = time.perf_counter() - t0
    report(1, worst <= 1e-8 and dt < 5.0, f"max rel k error {worst:.2e}, {dt:.2f} s")


def test_c02_linear_closed_forms():
    t0 = time.perf_counter()
    params = {"D0": 1.0, "B0": 0.0, "rho": 1.0}
    ic = (1.0, -0.5)
    worst = {}
    for name, F in (("Delta^2>0", 3.0), ("Delta=0", 2.0), ("Delta^2<0", 1.0)):
        c = fit_linear_constants(params, F, ic)
        traj = integrate_ode(lambda _, y: np.array([y[1], -F * y[1] - y[0]]), list(ic), 0.0, 5.0,
                             Tolerance(rel=1e-11, abs=1e-13))
        xs = np.linspace(0.0, 5.0, 201)
        worst[name] = float(np.max(np.abs(traj(xs)[:, 0] - linear_closed_form(params, F, c.C, c.xi0, xs))))
    dt = time.perf_counter() - t0
    ok = max(worst.values()) <= 1e-6 and dt < 1.0
    report(2, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f", {dt:.2f} s")


def test_c03_chiellini_residual_gate():
    t0 = time.perf_counter()
    res, fi = 0.0, 0.0
    for k in (1 / 8, 1 / 4, 1 / 3):
        for a in (0.25, 0.5, 1.0):
            m = make_model(Family.GeneralizedFisher,
                           {"D0": 1.0, "B0": 0.0, "rho": 1.0, "u_max": 1.0, "alpha": a})
            V_f = wave_speed_from_k(1.0, 1.0, k, 0.0)
            cert = detect_k(abel_reduce(m, V_f))
            sol = solve_theorem1(m, V_f, cert, (0.5, -0.1))
            res = max(res, float(tw_residuals(sol)[2].max()))
            fi = max(fi, max(abs(sol.first_integral(t, sol.slope(t)) - 1.0) for t in sol.t[1:-1]))
    dt = time.perf_counter() - t0
    report(3, res <= 1e-6 and fi <= 1e-7 and dt < 10.0,
           f"residual {res:.1e}, first integral {fi:.1e}, {dt:.1f} s")


def test_c04_cross_route_equivalence():
    # D Q = beta f u with D = 1 is the linear model rho = beta (V_f + B0); the
    # initial slope ratio lies between the two decay rates so u stays monotone
    beta, B0, V_f = 0.2, 0.5, 0.5
    ic = (0.5, -0.25)
    lem = case_linear_DQ(0.0, beta, B0, V_f, ic)
    lin = make_model(Family.LinearQ, {"D0": 1.0, "B0": B0, "rho": beta * (V_f + B0)})
    chi = solve_theorem1(lin, V_f, detect_k(abel_reduce(lin, V_f)), ic)
    lo = max(lem.xi[0], chi.xi[0], -10.0)
    hi = min(lem.xi[-1], chi.xi[-1], 10.0)
    xs = np.linspace(lo, hi, 401)
    dev = float(np.max(np.abs(lem.interpolate(xs) - chi.interpolate(xs))))
    report(4, (lo, hi) == (-10.0, 10.0) and dev <= 1e-6,
           f"L_inf {dev:.1e} on common window [{lo:g}, {hi:g}]")


LEMKE = {
    "ConstantDQ": (Family.ConstantDQ, {"D0": 1, "B0": 1, "alpha": 0.5}, 1.0, (0.5, -0.2)),
    "LinearDQ": (Family.LinearDQ, {"D0": 1, "B0": 1, "alpha": 0.5, "beta": 0.2, "V_f": 2.0}, 2.0,
                 (0.5, -0.2)),
    "InverseDQ": (Family.InverseDQ, {"D0": 1, "B0": 1, "K": 1.0}, 1.0, (0.5, -0.2)),
    "PowerLawDQ": (Family.PowerLawDQ, {"D0": 1, "B0": 1, "m": 2, "b": 0.54, "sign": 1.0,
                                       "V_f": 1.0}, 1.0, (0.5, -0.1)),
}


def test_c05_lemke_case_residuals():
    worst, tau_dev = {}, None
    for name, (fam, p, V, ic) in LEMKE.items():
        sol = solve_lemke(make_model(fam, p), V, ic)
        worst[name] = max(fin_residual(sol, t, relative=True) for t in sol.t[1:-1])
        if fam is Family.InverseDQ:
            tau = inverse_dq_tau_explicit(p["K"], sol.constants["k2"], sol.t)
            tau_dev = float(np.max(np.abs(tau - (V + p["B0"]) * sol.u)))
    ok = max(worst.values()) <= 1e-7 and tau_dev <= 1e-9
    report(5, ok, ", ".join(f"{k} {v:.1e}" for k, v in worst.items()) + f", tau {tau_dev:.1e}")


def test_c06_hypergeometric_model():
    b_ok = abs(powerlaw_reaction_b(2.0, 2.0) - 27 / 50) <= 1e-15
    res = {}
    for m in (2, 4):
        sol = powerlaw_reaction_solution(m, 2.0, (1.0, 0.0))
        res[m] = float(tw_residuals(sol)[2].max())
    report(6, b_ok and max(res.values()) <= 1e-5,
           f"b = {powerlaw_reaction_b(2.0, 2.0)!r}, residual m=2 {res[2]:.1e}, m=4 {res[4]:.1e}")


def test_c07_special_functions():
    e1 = abs(erf(1.0) - 0.842700792949715)
    devs = []
    for e in (3.0, 5.0):
        for th in (0.1, 0.5, 1.0, 2.0, 4.0):
            series = th * hyp2f1(0.5, 1 / e, 1 + 1 / e, -th ** e)
            integral = quad(lambda p: (1 + p ** e) ** -0.5, 0.0, th, Tolerance(rel=1e-13, abs=1e-15))
            devs.append(abs(series - integral))
    report(7, e1 <= 1e-12 and max(devs) <= 1e-9 and len(devs) == 10,
           f"erf(1) error {e1:.1e}, 2F1 identity max {max(devs):.1e} at {len(devs)} points")


def test_c08_pde_self_consistency():
    t0 = time.perf_counter()
    m = make_model(Family.GeneralizedFisher, {"D0": 1.0, "B0": 0.0, "rho": 1.0, "u_max": 1.0,
                                              "alpha": 0.5})
    V_f = wave_speed_from_k(1.0, 1.0, 0.25, 0.0)
    sol = solve_theorem1(m, V_f, detect_k(abel_reduce(m, V_f)), (0.5, -0.1))
    rep = verify(sol, config=VerifyConfig(pde=True, pde_T=2.0, pde_points=2048, pde_tol=0.01))
    dt = time.perf_counter() - t0
    err = rep.details["pde_l2_rel"]
    report(8, rep.flags["pde_translation"] and err <= 0.01 and dt < 60.0,
           f"interior L2 {err:.1e} after T=2 on 2048 points, {dt:.1f} s")


def test_c09_wave_speed():
    V_f = wave_speed_from_k(1.0, 1.0, 0.25, 0.0)
    fk_min = 2.0 * math.sqrt(1.0 * 1.0)
    # alpha = 0 dimensionless model, lambda = k (V+1)^2 = 1, expected speed V = 1
    m = fisher_powerlaw_model(0.0, 0.25, 1.0)
    T = 40.0
    x = np.arange(0.0, T + 40.0 + 1e-9, 0.1)
    u0 = np.where(x < 5.0, 1.0, 0.0)
    snaps = pde_evolve(m, WaveProfile(x, u0), T, times=np.linspace(0.0, T, 41),
                       boundary="neumann-zero", u_bound=1e300, advection="hybrid")
    # track the u = 1/2 level on the growing profile's leading edge
    sp = front_speed(snaps, level=0.5).speed
    ok = V_f == 2.0 and V_f == fk_min and abs(sp - 1.0) <= 0.05
    report(9, ok, f"V_f = {V_f}, FK minimum {fk_min}, PDE front speed {sp:.4f} (expected 1)")


def _monotone_from_one(u):
    return u[0] >= 0.98 and np.all(np.diff(u) < 0) and 0 < u[-1] <= 0.5


@pytest.mark.parametrize("which", ["fig1", "fig2", "fig3"])
def test_c10_figure_bundles(tmp_path, which):
    code = run_figures(which, out_dir=tmp_path)
    curves = sorted(p for p in tmp_path.glob(f"{which}_*.csv") if "fk_reference" not in p.name)
    n_expected = len(FIGURE_SETS[which].get("alpha", [])) if which == "fig1" else \
        len(FIGURE_SETS[which].get("k", FIGURE_SETS[which].get("m", [])))
    mono = all(_monotone_from_one(read_solution_csv(p)[3]) for p in curves)
    V = FIGURE_SETS[which].get("V", 1.0) if which == "fig3" else 1.0
    model, prof = fk_reference(V, 1e-3, 1e-3, 120.0 if which == "fig3" else 40.0,
                               1.0 / (V + 1.0) if which == "fig3" else 1.0)
    fk_res = profile_residual(prof, model, V)
    ok = code == 0 and len(curves) == n_expected and mono and fk_res <= 1e-6 \
        and _monotone_from_one(prof.u_values)
    report(10, ok, f"{which}: {len(curves)} curves monotone={mono}, FK reference residual {fk_res:.1e}")
