import math

import mpmath
import numpy as np
import pytest

from abelwave.errors import ConfigError, DomainError, ICSolveError
from abelwave.lemke import (PowerLawIntegral, case_inverse_DQ, fin_residual,
                            fit_powerlaw_constants, inverse_dq_tau_explicit,
                            linear_dq_exponents, powerlaw_reaction_b,
                            powerlaw_reaction_solution, powerlaw_reaction_xi, solve_lemke)
from abelwave.model import Family, make_model
from abelwave.oracle import tw_residuals

# frozen from the first converged runs (V = 2, U(0) = 1, U'(0) = 0)
PR_FROZEN = {2: (0.9517305356530008, -2.2697624312273863), 4: (1.0362927138762077, -1.4302271764902752)}

CASES = {
    "constant": (Family.ConstantDQ, {"D0": 1, "B0": 1, "alpha": 0.5}, 1.0, (0.5, -0.2)),
    "linear": (Family.LinearDQ, {"D0": 1, "B0": 1, "alpha": 0.5, "beta": 0.2, "V_f": 2.0}, 2.0,
               (0.5, -0.2)),
    "inverse": (Family.InverseDQ, {"D0": 1, "B0": 1, "K": 1.0}, 1.0, (0.5, -0.2)),
    "powerlaw": (Family.PowerLawDQ, {"D0": 1, "B0": 1, "m": 2, "b": 0.54, "sign": 1.0, "V_f": 1.0},
                 1.0, (0.5, -0.1)),
}


def _max_fin(sol):
    return max(fin_residual(sol, th, relative=True) for th in sol.t[1:-1:11])


@pytest.mark.parametrize("name", sorted(CASES))
def test_case_solves_wave_equation(name):
    fam, p, V, ic = CASES[name]
    sol = solve_lemke(make_model(fam, p), V, ic)
    assert _max_fin(sol) <= 1e-7
    assert tw_residuals(sol)[2].max() <= 1e-6
    i = int(np.argmin(np.abs(sol.xi)))
    assert abs(sol.xi[i]) <= 1e-12 and sol.u[i] == pytest.approx(ic[0], rel=1e-10)
    assert sol.slope(sol.t[i]) == pytest.approx(ic[1], rel=1e-8)


def test_linear_dq_closed_form_constants():
    fam, p, V, ic = CASES["linear"]
    sol = solve_lemke(make_model(fam, p), V, ic)
    assert sol.constants["closed_form_dev"] <= 1e-12
    mp, mm = linear_dq_exponents(0.2, 3.0)
    assert mp + mm == pytest.approx(1.0) and mp * mm == pytest.approx(0.2 / 3.0)


def test_inverse_dq_explicit_tau():
    fam, p, V, ic = CASES["inverse"]
    sol = solve_lemke(make_model(fam, p), V, ic)
    k2 = sol.constants["k2"]
    tau = inverse_dq_tau_explicit(1.0, k2, sol.t)
    assert np.max(np.abs(tau / 2.0 - sol.u)) <= 1e-9
    # oracle: the same expression through mpmath
    th = 0.37
    ref = float(mpmath.sqrt(0.5) * mpmath.e ** (-th * th) / (mpmath.sqrt(mpmath.pi) / 2 * mpmath.erf(th) + k2))
    assert inverse_dq_tau_explicit(1.0, k2, th) == pytest.approx(ref, rel=1e-13)


def test_inverse_dq_excluded_theta_rejected():
    # erf(theta) sqrt(pi)/2 + k2 = 0 at theta = 0 for k2 = 0
    with pytest.raises(DomainError):
        case_inverse_DQ(1.0, 1.0, 1.0, 1.0, 0.0, theta_range=(-1.0, 1.0))
    with pytest.raises(DomainError):
        case_inverse_DQ(-1.0, 1.0, 1.0, 1.0, 2.0)


def test_powerlaw_hyp2f1_cross_check():
    fam, p, V, ic = CASES["powerlaw"]
    sol = solve_lemke(make_model(fam, p), V, ic)
    assert sol.constants["hyp2f1_dev"] <= 1e-9


def test_powerlaw_integral_against_mpmath():
    I = PowerLawIntegral(2.0, 1.0)
    for th in (0.3, 1.0, 2.5):
        ref = float(mpmath.quad(lambda s: 1 / mpmath.sqrt(1 + s ** 3), [0, th]))
        assert I(th) == pytest.approx(ref, rel=1e-11)


def test_reaction_b_value():
    assert powerlaw_reaction_b(2.0, 2.0) == pytest.approx(27 / 50, rel=1e-14)


@pytest.mark.parametrize("m", [2, 4])
def test_powerlaw_reaction_constants_and_residual(m):
    sol = powerlaw_reaction_solution(m, 2.0, (1.0, 0.0))
    theta0, l2 = PR_FROZEN[m]
    assert sol.constants["theta0"] == pytest.approx(theta0, rel=1e-9)
    assert sol.constants["l2"] == pytest.approx(l2, rel=1e-9)
    assert tw_residuals(sol)[2].max() <= 1e-5
    assert _max_fin(sol) <= 1e-7
    xi_cf = powerlaw_reaction_xi(sol.t[::50], l2, m)
    # samples carry xi(theta0) = 0
    np.testing.assert_allclose(xi_cf - powerlaw_reaction_xi(theta0, l2, m), sol.xi[::50], atol=1e-8)


def test_powerlaw_ic_without_solution():
    with pytest.raises(ICSolveError):
        fit_powerlaw_constants(2, 1.0, 0.54, 1.0, 1.0, (1.0, -0.003), search_max=0.1)


def test_lemke_dispatch_errors():
    with pytest.raises(ConfigError):
        solve_lemke(make_model(Family.LinearQ, {"D0": 1, "B0": 0, "rho": 1}), 1.0, (0.5, -0.1))
    fam, p, _, ic = CASES["linear"]
    with pytest.raises(ConfigError):
        solve_lemke(make_model(fam, p), 3.0, ic)
    with pytest.raises(DomainError):
        make_model(Family.PowerLawDQ, {"D0": 1, "B0": 1, "m": 1, "b": 1, "V_f": 0})
