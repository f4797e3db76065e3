import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from abelwave.errors import BracketError, ConfigError, ConvergenceError, IntegrationError
from abelwave.numerics import (Tolerance, derivative, erf, find_root, hyp2f1, integrate_ode,
                               quad, second_derivative)

# frozen from mpmath at 30 digits
ERF_1 = 0.842700792949715
HYP_FROZEN = {
    (0.5, 1 / 3, 4 / 3, -8.0): 0.7010910526627271,
    (0.5, 0.2, 1.2, -0.3): 0.9776275899641971,
}


def test_erf_frozen_value():
    assert abs(erf(1.0) - ERF_1) <= 1e-12


@pytest.mark.parametrize("x", [-7.0, -2.5, -1e-8, 0.0, 0.3, 1.7, 2.99, 3.01, 4.5, 6.4, 9.0])
def test_erf_matches_mpmath(x):
    assert abs(erf(x) - float(mpmath.erf(x))) <= 1e-14


def test_erf_odd_and_nan():
    assert erf(-0.7) == -erf(0.7)
    assert math.isnan(erf(float("nan")))


@given(st.floats(-6, 6))
@settings(max_examples=200, deadline=None)
def test_erf_property_against_scipy(x):
    assert abs(erf(x) - special.erf(x)) <= 2e-14


def test_hyp2f1_frozen():
    for args, val in HYP_FROZEN.items():
        assert abs(hyp2f1(*args) - val) <= 1e-12 * abs(val)


@pytest.mark.parametrize("z", [-50.0, -3.0, -1.5, -0.7, -0.2, 0.0, 0.3, 0.6, 0.95])
@pytest.mark.parametrize("abc", [(0.5, 0.25, 1.25), (0.5, 1 / 3, 4 / 3), (1.2, 0.7, 2.3)])
def test_hyp2f1_against_mpmath(abc, z):
    ref = float(mpmath.hyp2f1(*abc, z))
    assert abs(hyp2f1(*abc, z) - ref) <= 1e-11 * max(1.0, abs(ref))


def test_hyp2f1_integral_identity():
    # theta 2F1(1/2, 1/e; 1 + 1/e; -theta^e) = int_0^theta (1 + psi^e)^(-1/2) dpsi
    for e in (3.0, 5.0, 11.0):
        for th in (0.2, 0.9, 1.7, 4.0):
            lhs = th * hyp2f1(0.5, 1 / e, 1 + 1 / e, -th ** e)
            rhs = integrate.quad(lambda p: (1 + p ** e) ** -0.5, 0, th, epsabs=1e-14,
                                 epsrel=1e-13)[0]
            assert abs(lhs - rhs) <= 1e-11


def test_quad_polynomial_exact_and_sign_flip():
    f = lambda x: 3 * x ** 2 - 2 * x + 1
    assert abs(quad(f, 0.0, 2.0) - 6.0) <= 1e-13
    assert quad(f, 2.0, 0.0) == -quad(f, 0.0, 2.0)


def test_quad_endpoint_singularity():
    val = quad(lambda x: 1 / np.sqrt(x), 0.0, 1.0, Tolerance(rel=1e-10, abs=1e-12))
    assert abs(val - 2.0) <= 1e-8


def test_quad_return_error_and_scalar_mode():
    val, err = quad(math.cos, 0.0, 1.0, vectorized=False, return_error=True)
    assert abs(val - math.sin(1.0)) <= 1e-13
    assert err >= 0


def test_quad_cap_raises_with_estimate():
    with pytest.raises(ConvergenceError) as info:
        quad(lambda x: np.sin(1 / x), 1e-6, 1.0, Tolerance(rel=1e-14, abs=0.0, max_iter=3))
    assert info.value.estimate is not None


def test_find_root_cubic_and_bracket_error():
    r = find_root(lambda x: x ** 3 - 2, 0.0, 2.0, Tolerance(rel=1e-15, abs=1e-15))
    assert abs(r - 2 ** (1 / 3)) <= 1e-14
    with pytest.raises(BracketError):
        find_root(lambda x: x * x + 1, -1.0, 1.0)


@given(st.floats(-5, 5))
@settings(max_examples=100, deadline=None)
def test_find_root_property(c):
    r = find_root(lambda x: math.tanh(x) * 10 - c, -10, 10, Tolerance(rel=1e-14, abs=1e-14))
    assert abs(10 * math.tanh(r) - c) <= 1e-12


def test_integrate_ode_harmonic_oscillator_dense_output():
    traj = integrate_ode(lambda t, y: np.array([y[1], -y[0]]), [1.0, 0.0], 0.0, 10.0,
                         Tolerance(rel=1e-11, abs=1e-13))
    ts = np.linspace(0, 10, 37)
    assert np.max(np.abs(traj(ts)[:, 0] - np.cos(ts))) <= 1e-8


def test_integrate_ode_backwards_matches_scipy():
    rhs = lambda t, y: np.array([-2 * t * y[0]])
    traj = integrate_ode(rhs, [1.0], 0.0, -1.5, Tolerance(rel=1e-11, abs=1e-14))
    ref = integrate.solve_ivp(rhs, (0, -1.5), [1.0], rtol=1e-12, atol=1e-14).y[0, -1]
    assert abs(traj.t_end + 1.5) <= 1e-15
    assert abs(traj(-1.5)[0] - ref) <= 1e-9
    assert abs(ref - math.exp(-2.25)) <= 1e-9


def test_integrate_ode_event_and_blowup():
    traj = integrate_ode(lambda t, y: y, [1.0], 0.0, 10.0, event=lambda t, y: y[0] > 100.0)
    assert math.log(100.0) < traj.t_end < 10.0 and traj.y[-2][0] <= 100.0
    with pytest.raises(IntegrationError) as info:
        integrate_ode(lambda t, y: np.array([y[0] ** 2]), [1.0], 0.0, 2.0)
    assert info.value.trajectory is not None and info.value.trajectory.t_end < 1.0


def test_derivatives():
    assert abs(derivative(math.exp, 0.3, 1e-2) - math.exp(0.3)) <= 1e-10
    assert abs(second_derivative(math.sin, 0.4, 1e-2) + math.sin(0.4)) <= 1e-8


def test_tolerance_validation():
    with pytest.raises(ConfigError):
        Tolerance(rel=0.0)
    assert Tolerance().scaled(0.5).rel == 0.5e-10
