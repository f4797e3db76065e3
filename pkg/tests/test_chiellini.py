import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import solve_ivp

from abelwave.chiellini import (Branch, branch_of, certificate_for, dF_dtheta, detect_k,
                                fisher_powerlaw_model, fisher_powerlaw_solution,
                                fit_linear_constants, linear_closed_form, log_exp_F,
                                singular_points, solve_theorem1, theta_component,
                                wave_speed_from_k)
from abelwave.errors import ConfigError, DegenerateError, DomainError
from abelwave.model import Family, abel_reduce, make_custom_model, make_model
from abelwave.oracle import tw_residuals

# frozen from the first run of the dimensionless model at V = 1, ic (0.5, -0.1)
THETA0_FROZEN = {(0.25, 1.0): -1.25, (0.125, -1.0): -2.5, (1 / 3, 1.0): -1.6666666666666665}


def _scipy_wave(model, V_f, ic, x1):
    def rhs(_, y):
        u, p = y
        return [p, -(float(model.dlnD_fn(u)) * p * p
                     + (V_f + float(model.B(u))) / float(model.D(u)) * p
                     + float(model.gamma_fn(u)))]
    return solve_ivp(rhs, (0.0, x1), list(ic), rtol=1e-12, atol=1e-14).y[0, -1]


def test_branch_and_singular_points():
    assert branch_of(0.25) is Branch.KeqQuarter
    assert branch_of(0.3) is Branch.KgtQuarter and branch_of(0.1) is Branch.KltQuarter
    r = math.sqrt(0.6)
    np.testing.assert_allclose(singular_points(0.1), [(-1 - r) / 2, (-1 + r) / 2, 0.0])
    assert singular_points(0.25) == [-0.5, 0.0]
    assert theta_component(0.3, 0.1) == (0.0, math.inf)
    lo, hi = theta_component(-0.3, 0.1)
    assert lo == pytest.approx((-1 - r) / 2) and hi == pytest.approx((-1 + r) / 2)


def test_exp_F_derivative_consistent():
    for k in (0.1, 0.25, 0.7):
        for th in (-2.0, 0.4, 3.0):
            h = 1e-5
            d = (log_exp_F(th + h, k)[1] - log_exp_F(th - h, k)[1]) / (2 * h)
            assert d == pytest.approx(float(dF_dtheta(th, k)), rel=1e-7)


def test_wave_speed_from_k():
    assert wave_speed_from_k(1.0, 1.0, 0.25, 0.0) == 2.0
    assert wave_speed_from_k(1.0, 1.0, 0.25, 1.0, sign=-1.0) == -3.0
    with pytest.raises(DomainError):
        wave_speed_from_k(1.0, 1.0, 0.0, 0.0)
    with pytest.raises(DomainError):
        wave_speed_from_k(-1.0, 1.0, 0.25, 0.0)


@pytest.mark.parametrize("k", [0.1, 0.25, 0.3, 1.7])
def test_detect_k_recovers_fisher_k(k):
    cert = detect_k(abel_reduce(fisher_powerlaw_model(0.5, k, 1.0), 1.0))
    assert cert is not None
    assert abs(cert.k - k) <= 1e-8 * k
    assert cert.branch is branch_of(k)


def test_detect_k_rejects_non_integrable():
    m = make_custom_model(lambda u: 1 + 0 * u, lambda u: 0 * u, lambda u: u - u ** 3, (0, 1))
    assert detect_k(abel_reduce(m, 1.0)) is None


@given(st.floats(0.05, 3.0), st.floats(0.1, 3.0), st.floats(0.1, 3.0))
@settings(max_examples=25, deadline=None)
def test_detect_k_linear_model_property(rho, D0, F):
    # g/f = D0 rho u / F  ->  k = D0 rho / F^2
    m = make_model(Family.LinearQ, {"D0": D0, "B0": 0.0, "rho": rho})
    cert = detect_k(abel_reduce(m, F))
    assert cert is not None and cert.k == pytest.approx(D0 * rho / F ** 2, rel=1e-7)


@pytest.mark.parametrize("k", [0.125, 0.25, 1 / 3])
@pytest.mark.parametrize("alpha", [0.25, 1.0, -1.0, -2.0])
def test_parametric_residual_and_first_integral(k, alpha):
    sol = fisher_powerlaw_solution(alpha, k, 1.0, (0.5, -0.1))
    _, _, rel = tw_residuals(sol)
    assert rel.max() <= 1e-6
    fi = max(abs(sol.first_integral(th, sol.slope(th)) - 1) for th in sol.t[::17])
    assert fi <= 1e-7
    if (k, alpha) in THETA0_FROZEN:
        assert sol.constants["theta0"] == pytest.approx(THETA0_FROZEN[(k, alpha)], rel=1e-14)


def test_parametric_against_scipy_integration():
    sol = fisher_powerlaw_solution(0.5, 0.25, 1.0, (0.5, -0.1))
    i = int(np.argmin(np.abs(sol.xi - 3.0)))
    ref = _scipy_wave(sol.model, 1.0, (0.5, -0.1), sol.xi[i])
    assert abs(ref - sol.u[i]) <= 1e-9


@pytest.mark.parametrize("alpha", [-1.0, -2.0])
def test_fisher_closed_forms_at_quarter(alpha):
    sol = fisher_powerlaw_solution(alpha, 0.25, 1.0, (0.5, -0.1))
    assert sol.constants["closed_form_dev"] <= 1e-10


def test_theta_range_crossing_singular_point():
    sol_model = fisher_powerlaw_model(0.5, 0.1, 1.0)
    # theta0 = k (V+1) U0 (1-U0)^alpha / U0' is negative here
    with pytest.raises(DomainError):
        solve_theorem1(sol_model, 1.0, certificate_for(0.1), (0.5, -0.1), theta_range=(-1.0, -0.01))
    with pytest.raises(ConfigError):
        solve_theorem1(sol_model, 1.0, certificate_for(0.1), (0.5, -0.1), theta_range=(1.0, 2.0))


def test_degenerate_initial_slope():
    with pytest.raises(DegenerateError):
        fisher_powerlaw_solution(0.5, 0.25, 1.0, (0.5, 0.0))
    with pytest.raises(DomainError):
        fisher_powerlaw_solution(0.5, 0.25, 1.0, (1.2, -0.1))


@pytest.mark.parametrize("rho,F", [(1.0, 3.0), (1.0, 2.0), (1.0, 1.0)])
def test_linear_closed_form_against_scipy(rho, F):
    # hyperbolic, critical and oscillatory cases
    params = {"D0": 1.0, "B0": 0.0, "rho": rho}
    m = make_model(Family.LinearQ, params)
    ic = (1.0, -0.5)
    c = fit_linear_constants(params, F, ic)
    assert linear_closed_form(params, F, c.C, c.xi0, 0.0) == pytest.approx(1.0, rel=1e-13)
    for x1 in (0.7, 2.5):
        ref = _scipy_wave(m, F, ic, x1)
        assert abs(linear_closed_form(params, F, c.C, c.xi0, x1) - ref) <= 1e-9


def test_linear_fit_outside_hyperbolic_family():
    with pytest.raises(DomainError):
        fit_linear_constants({"D0": 1.0, "B0": 0.0, "rho": 1.0}, 3.0, (1.0, -5.0))
