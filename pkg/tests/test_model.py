import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from abelwave.errors import ConfigError, DegenerateError, DomainError
from abelwave.model import (Family, abel_reduce, make_custom_model, make_model, model_from_dict,
                            nondimensionalize, powerlaw_dq_A, powerlaw_dq_coefficient,
                            probe_grid, travelling_wave_coefficients)

FISHER = {"D0": 1.5, "B0": 0.3, "rho": 2.0, "u_max": 2.0, "alpha": 0.5}


def test_fisher_closures_match_formulas():
    m = make_model(Family.GeneralizedFisher, FISHER)
    u = np.array([0.1, 0.7, 1.5])
    om = 1 - u / 2.0
    np.testing.assert_allclose(m.D(u), 1.5 * om ** -0.5, rtol=1e-15)
    np.testing.assert_allclose(m.Q(u), 2.0 * u * om ** 0.5, rtol=1e-15)
    np.testing.assert_allclose(m.gamma_fn(u), m.Q(u) / m.D(u), rtol=1e-14)
    np.testing.assert_allclose(m.dlnD_fn(u), 0.5 / (2.0 * om), rtol=1e-14)


def test_validity_interval_enforced():
    m = make_model(Family.GeneralizedFisher, FISHER)
    assert m.interval[1] < 2.0
    with pytest.raises(DomainError):
        m.D(2.0)
    with pytest.raises(DomainError):
        m.Q(-0.1)


def test_alpha_zero_lifts_upper_bound():
    m = make_model(Family.PowerLawFisher, {"D0": 1, "B0": 1, "rho": 1, "alpha": 0.0})
    assert m.interval[1] == math.inf
    assert float(m.Q(3.0)) == 3.0


def test_parameter_validation():
    with pytest.raises(ConfigError):
        make_model("NoSuchFamily", {})
    with pytest.raises(ConfigError):
        make_model(Family.LinearQ, {"D0": 1, "B0": 0})
    with pytest.raises(ConfigError):
        make_model(Family.LinearQ, {"D0": 1, "B0": 0, "rho": 1, "extra": 2})
    with pytest.raises(DomainError):
        make_model(Family.LinearQ, {"D0": -1, "B0": 0, "rho": 1})
    with pytest.raises(DomainError):
        make_model(Family.PowerLawDQ, {"D0": 1, "B0": 1, "m": -1, "b": 1, "V_f": 0})
    with pytest.raises(ConfigError):
        make_model(Family.Custom, {})


def test_model_from_dict():
    m, vf = model_from_dict({"family": "LinearQ", "params": {"D0": 1, "B0": 0, "rho": 1},
                             "V_f": 2})
    assert m.family is Family.LinearQ and vf == 2.0
    with pytest.raises(ConfigError):
        model_from_dict({"family": "LinearQ", "colour": 1})


def test_fd_derivatives_for_custom_model():
    m = make_custom_model(lambda u: 1 + u ** 2, lambda u: 0 * u, lambda u: np.sin(u), (0, 3))
    assert abs(m.dlnD_fn(1.0) - 1.0) <= 1e-8
    assert abs(m.dQ_fn(1.0) - math.cos(1.0)) <= 1e-8


def test_probe_grid_inside_interval():
    m = make_model(Family.GeneralizedFisher, FISHER)
    g = probe_grid(m, 16)
    assert len(g) == 16 and g.min() > 0 and g.max() < m.interval[1]
    assert np.all(np.diff(g) > 0)


def test_travelling_wave_coefficients_and_residual():
    m = make_model(Family.LinearQ, {"D0": 2.0, "B0": 1.0, "rho": 3.0})
    tw = travelling_wave_coefficients(m, 4.0)
    assert tw.beta_fn(0.3) == pytest.approx(2.5)
    assert tw.gamma_fn(0.3) == pytest.approx(0.45)
    # u = e^{r xi} with 2 r^2 + 5 r + 3 = 0  ->  r = -1
    assert abs(tw.residual(1.0, -1.0, 1.0) - (1 - 2.5 + 1.5)) <= 1e-15
    with pytest.raises(DomainError):
        travelling_wave_coefficients(m, -1.0)


def test_abel_form_pieces():
    m = make_model(Family.GeneralizedFisher, FISHER)
    ab = abel_reduce(m, 1.2)
    u = 0.8
    assert ab.f_fn(u) == pytest.approx(1.5)
    assert ab.g_fn(u) == pytest.approx(float(m.D(u) * m.Q(u)))
    assert ab.w0(u, -0.5) == pytest.approx(1 / (float(m.D(u)) * -0.5))
    with pytest.raises(DegenerateError):
        ab.w0(u, 0.0)
    zero_f = abel_reduce(make_model(Family.LinearQ, {"D0": 1, "B0": 0, "rho": 1}), 0.0)
    with pytest.raises(DegenerateError):
        zero_f.ratio(0.5)


def test_convection_family_shifted_B():
    p = {"D0": 1.0, "B0": 2.0, "rho": 1.0, "alpha": 0.0, "k": 0.25, "V_f": 1.0}
    m = make_model(Family.ConvectionFamily, p)
    u = 0.5
    c = 0.25 * 4.0
    assert float(m.f_fn(1.0, u)) == pytest.approx(2.0 * u / math.sqrt(1 + c * u * u))


def test_powerlaw_dq_constants():
    assert powerlaw_dq_coefficient(2.0) == pytest.approx(6 / 25)
    # A = (m+1)(m-1)^2 b^(1-m) / (2 (m+3)^2); m = 2, b = 0.54
    assert powerlaw_dq_A(2.0, 0.54, 1.0) == pytest.approx(3 / 50 / 0.54)


def test_lemke_family_DQ_products():
    m = make_model(Family.LinearDQ, {"D0": 1, "B0": 1, "alpha": 0.5, "beta": 0.2, "V_f": 2,
                                     "kappa": 0.3})
    u = np.array([0.2, 1.1])
    np.testing.assert_allclose(m.D(u) * m.Q(u), 0.2 * 3 * u + 0.5, rtol=1e-14)
    inv = make_model(Family.InverseDQ, {"D0": 1, "B0": 1, "K": 2.0})
    assert float(inv.D(0.5) * inv.Q(0.5)) == pytest.approx(4.0)


def test_nondimensionalize_fisher():
    m = make_model(Family.PowerLawFisher, {"D0": 2.0, "B0": 4.0, "rho": 3.0, "u_max": 5.0,
                                           "alpha": 0.5})
    d = nondimensionalize(m)
    assert d.params["rho"] == pytest.approx(3.0 * 2.0 / 16.0)
    assert d.scaling.s_x == pytest.approx(2.0) and d.scaling.s_u == pytest.approx(0.2)
    with pytest.raises(DomainError):
        nondimensionalize(make_model(Family.PowerLawFisher, {**m.params, "B0": 0.0}))
    with pytest.raises(ConfigError):
        nondimensionalize(make_model(Family.LinearQ, {"D0": 1, "B0": 1, "rho": 1}))


@given(st.floats(0.1, 5), st.floats(0.1, 5), st.floats(0.05, 3))
@settings(max_examples=50, deadline=None)
def test_nondimensional_pde_is_rescaled_original(D0, B0, rho):
    # D~ = D s_x^2/s_t, B~ = B s_x/s_t, Q~ = Q s_u/s_t evaluated at matching states
    m = make_model(Family.PowerLawFisher, {"D0": D0, "B0": B0, "rho": rho, "u_max": 2.0,
                                           "alpha": 0.75})
    d = nondimensionalize(m)
    s = d.scaling
    u = 0.9
    U = s.s_u * u
    assert float(d.D(U)) == pytest.approx(float(m.D(u)) * s.s_x ** 2 / s.s_t, rel=1e-12)
    assert float(d.B(U)) == pytest.approx(float(m.B(u)) * s.s_x / s.s_t, rel=1e-12)
    assert float(d.Q(U)) == pytest.approx(float(m.Q(u)) * s.s_u / s.s_t, rel=1e-12)
