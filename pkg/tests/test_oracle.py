import csv
import json
import math

import numpy as np
import pytest

from abelwave.chiellini import fisher_powerlaw_solution, fit_linear_constants, linear_closed_form
from abelwave.errors import ConfigError, InstabilityError, TrackingError
from abelwave.model import Family, make_custom_model, make_model
from abelwave.numerics import Tolerance
from abelwave.oracle import (Boundary, PDEState, VerifyConfig, fixed_points, front_speed,
                             level_crossing, pde_evolve, profile_residual, shoot_wave_ode,
                             tw_residuals, verify, write_snapshots_csv)
from abelwave.solution import WaveProfile

LIN = {"D0": 1.0, "B0": 0.0, "rho": 1.0}


def _diffusion_model(Q=lambda u: 0 * u, interval=(-10.0, 10.0)):
    return make_custom_model(lambda u: 1 + 0 * u, lambda u: 0 * u, Q, interval)


def _states(fn, ts, x):
    return [PDEState(x, fn(x, t), t, Boundary.NeumannZero, 0.01) for t in ts]


def test_shooter_matches_linear_closed_form():
    m = make_model(Family.LinearQ, LIN)
    ic = (1.0, -0.5)
    prof = shoot_wave_ode(m, 3.0, ic, (-2.0, 4.0), n=241)
    c = fit_linear_constants(LIN, 3.0, ic)
    exact = linear_closed_form(LIN, 3.0, c.C, c.xi0, prof.xi_grid)
    assert np.max(np.abs(prof.u_values - exact)) <= 1e-8
    assert not prof.metadata["truncated"]


def test_shooter_zero_reaction_is_exponential():
    # u'' + c u' = 0 with u(0) = 1, u'(0) = -1, c = 2: u = 1/2 + e^{-2 xi}/2
    prof = shoot_wave_ode(_diffusion_model(), 2.0, (1.0, -1.0), (-1.0, 3.0), n=101)
    exact = 0.5 + 0.5 * np.exp(-2.0 * prof.xi_grid)
    assert np.max(np.abs(prof.u_values - exact)) <= 1e-9


def test_shooter_fixed_point_is_constant():
    m = _diffusion_model(lambda u: u - u ** 3, (-2.0, 2.0))
    prof = shoot_wave_ode(m, 1.0, (1.0, 0.0), (-3.0, 3.0), n=64)
    assert np.all(prof.u_values == 1.0)


def test_shooter_tolerance_halving_converges():
    m = make_model(Family.LinearQ, LIN)
    c = fit_linear_constants(LIN, 3.0, (1.0, -0.5))
    errs = []
    for rel in (1e-4, 1e-6, 1e-8):
        prof = shoot_wave_ode(m, 3.0, (1.0, -0.5), (0.0, 5.0), tol=Tolerance(rel=rel, abs=rel * 1e-2), n=51)
        errs.append(np.max(np.abs(prof.u_values - linear_closed_form(LIN, 3.0, c.C, c.xi0, prof.xi_grid))))
    assert errs[2] < errs[1] < errs[0]


def test_shooter_truncates_at_domain_exit():
    m = make_model(Family.GeneralizedFisher, {"D0": 1, "B0": 0, "rho": 1, "u_max": 1, "alpha": 1})
    prof = shoot_wave_ode(m, 2.0, (0.5, -0.4), (-40.0, 5.0), n=200)
    assert prof.metadata["truncated"]
    assert prof.metadata["xi_reached"][0] > -40.0


def test_neumann_mass_conservation():
    x = np.linspace(-10, 10, 401)
    prof = WaveProfile(x, np.exp(-x * x))
    out = pde_evolve(_diffusion_model(), prof, 1.0, boundary="neumann-zero")
    # cell-centred scheme: the plain sum is the conserved quantity
    assert abs(out[-1].u.sum() - prof.u_values.sum()) <= 1e-12
    # heat kernel: peak 1/sqrt(1 + 4t)
    assert out[-1].u.max() == pytest.approx(1 / math.sqrt(5.0), rel=2e-3)


def test_equilibrium_is_preserved():
    m = make_model(Family.GeneralizedFisher, {"D0": 1, "B0": 0.5, "rho": 1, "u_max": 2, "alpha": 1})
    x = np.linspace(0, 10, 101)
    out = pde_evolve(m, WaveProfile(x, np.zeros_like(x)), 2.0)
    assert np.all(out[-1].u == 0.0)


def test_blowup_raises_with_last_state():
    m = _diffusion_model(lambda u: u * u, (-1e300, 1e300))
    x = np.linspace(0, 1, 21)
    with pytest.raises(InstabilityError) as info:
        pde_evolve(m, WaveProfile(x, 2.0 + 0 * x), 5.0, boundary="neumann-zero", u_bound=1e6)
    assert info.value.last_state is not None and 0.45 < info.value.last_state.t < 0.5 + 0.01


def test_front_speed_synthetic_translation():
    x = np.linspace(-20, 40, 601)
    snaps = _states(lambda x, t: 0.5 * (1 - np.tanh(x - 2.0 * t)), np.linspace(0, 5, 11), x)
    est = front_speed(snaps)
    assert est.level == pytest.approx(0.5)
    assert abs(est.speed - 2.0) <= 1e-10
    still = _states(lambda x, t: 0.5 * (1 - np.tanh(x)), np.linspace(0, 5, 11), x)
    assert abs(front_speed(still).speed) <= 1e-12


def test_level_crossing_errors():
    x = np.linspace(0, 1, 11)
    assert level_crossing(x, 1 - x, 0.35) == pytest.approx(0.65)
    with pytest.raises(TrackingError):
        level_crossing(x, 1 - x, 2.0)
    with pytest.raises(TrackingError):
        level_crossing(x, np.cos(6 * x), 0.0)
    with pytest.raises(TrackingError):
        front_speed(_states(lambda x, t: 1 - x, [0, 1], x))


def test_fixed_points():
    m = make_model(Family.GeneralizedFisher, {"D0": 1, "B0": 0, "rho": 1, "u_max": 1, "alpha": 1})
    fp = fixed_points(m)
    assert fp[0] == 0.0 and fp[-1] == pytest.approx(1.0, abs=1e-8) and len(fp) == 2
    cubic = _diffusion_model(lambda u: u - u ** 3, (-2.0, 2.0))
    np.testing.assert_allclose(fixed_points(cubic), [-1.0, 0.0, 1.0], atol=1e-10)


def test_profile_residual_exact_and_corrupted():
    m = make_model(Family.LinearQ, LIN)
    prof = shoot_wave_ode(m, 3.0, (1.0, -0.5), (0.0, 3.0), n=601)
    assert profile_residual(prof, m, 3.0) <= 1e-6
    bad = WaveProfile(prof.xi_grid, prof.u_values * (1 + 0.01 * np.sin(prof.xi_grid)))
    assert profile_residual(bad, m, 3.0) > 1e-4


def test_verify_exact_wave_passes_and_exports_json(tmp_path):
    sol = fisher_powerlaw_solution(0.5, 0.25, 1.0, (0.5, -0.1))
    rep = verify(sol)
    assert rep.passed, rep.flags
    assert rep.residual_rel_max <= 1e-6 and rep.oracle_l2 <= 1e-5
    path = tmp_path / "r.json"
    rep.to_json(path)
    doc = json.loads(path.read_text())
    assert doc["passed"] is True and set(doc["flags"]) >= {"residual", "first_integral", "shooter"}


def test_verify_negative_control():
    sol = fisher_powerlaw_solution(0.5, 0.25, 1.0, (0.5, -0.1))
    bad = sol.replace_samples(sol.t, sol.xi, sol.u * 1.01)
    rep = verify(bad)
    assert not rep.passed and not rep.flags["residual"]


def test_verify_config_errors():
    with pytest.raises(ConfigError):
        VerifyConfig.from_dict({"residual_tol": 1e-6, "bogus": 1})
    sol = fisher_powerlaw_solution(0.5, 0.25, 1.0, (0.5, -0.1))
    short = sol.replace_samples(sol.t[:3], sol.xi[:3], sol.u[:3])
    with pytest.raises(ConfigError):
        verify(short)


def test_pde_translation_of_exact_wave():
    sol = fisher_powerlaw_solution(0.5, 0.25, 1.0, (0.5, -0.1))
    rep = verify(sol, config=VerifyConfig(pde=True, pde_points=1024))
    assert rep.flags["pde_translation"], rep.details
    # dimensionless model: the wave moves at V_f = V = 1
    assert rep.front_speed == pytest.approx(1.0, rel=0.05)


def test_snapshot_csv(tmp_path):
    x = np.linspace(0, 1, 5)
    snaps = _states(lambda x, t: x + t, [0.0, 0.5], x)
    path = tmp_path / "s.csv"
    write_snapshots_csv(path, snaps)
    with open(path) as fh:
        rows = list(csv.DictReader(line for line in fh if not line.startswith("#")))
    assert len(rows) == 10 and set(rows[0]) == {"t", "x", "u"}
    assert float(rows[-1]["u"]) == pytest.approx(1.5)


def test_tw_residuals_shapes():
    sol = fisher_powerlaw_solution(1.0, 0.25, 1.0, (0.5, -0.1))
    t, ab, rel = tw_residuals(sol, samples=(sol.t[5:55], sol.u[5:55]))
    assert len(t) == len(ab) == len(rel) == 50 and ab.max() <= 1e-10 and np.all(rel <= ab + 1e-300)
