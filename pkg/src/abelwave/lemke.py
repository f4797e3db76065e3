"""Travelling waves through the Lemke transformation.

With tau = integral of f du and w = -(1/eta) d eta/d tau, the Abel equation
becomes the second-order equation

    eta^2 d^2 tau/d eta^2 + D Q / (V_f + B) = 0.

For constant B = B0, tau = (V_f + B0) u, and any solution (tau, eta) of this
equation, possibly given through a parameter t, yields a wave with

    u = tau / (V_f + B0),   d xi / dt = -(D(u) / (V_f + B0)) (d eta/dt) / eta.

Four product forms of D Q integrate in closed form: constant, linear in tau,
inverse in tau (an Emden-Fowler equation) and linear minus power law in tau.
"""

from __future__ import annotations

import bisect
import enum
import math
from dataclasses import dataclass, replace
from typing import Callable, Mapping

import numpy as np

from .errors import (AbelWaveError, BracketError, ConfigError, DegenerateError, DomainError,
                     ICSolveError)
from .model import (Family, RCDModel, make_custom_model, make_model, powerlaw_dq_A,
                    powerlaw_dq_coefficient)
from .numerics import DEFAULT_TOL, Tolerance, derivative, erf, find_root, hyp2f1, quad
from .sampling import MarchSettings, assemble, march
from .solution import ParametricSolution, Route

SQRT_PI_2 = 0.5 * math.sqrt(math.pi)
# tolerance on 1 - 4 beta / F below which the two exponents are treated as equal
DOUBLE_ROOT_TOL = 1e-12


class LemkeCase(str, enum.Enum):
    ConstantDQ = "ConstantDQ"
    LinearDQ = "LinearDQ"
    InverseDQ = "InverseDQ"
    PowerLawDQ = "PowerLawDQ"


@dataclass(frozen=True)
class LemkeState:
    """Exact solution (tau(t), eta(t)) of the Lemke equation along a parameter t.

    ``jet(t)`` returns (tau, tau_t, tau_tt, eta, eta_t, eta_tt). For the
    constant and linear cases t is eta itself.
    """

    case: LemkeCase
    param: str
    constants: Mapping[str, float]
    jet: Callable[[float], tuple]
    F: float

    def tau(self, t: float) -> float:
        return self.jet(t)[0]

    def eta(self, t: float) -> float:
        return self.jet(t)[3]

    def tau_ee(self, t: float) -> float:
        """d^2 tau / d eta^2 through the parameter."""
        _, tt, ttt, _, et, ett = self.jet(t)
        if et == 0.0:
            raise DegenerateError(f"d eta/d{self.param} vanishes at {t}")
        return (ttt * et - tt * ett) / et ** 3

    def eta_tautau(self, t: float) -> float:
        """d^2 eta / d tau^2 through the parameter."""
        _, tt, ttt, _, et, ett = self.jet(t)
        if tt == 0.0:
            raise DegenerateError(f"d tau/d{self.param} vanishes at {t}")
        return (ett * tt - et * ttt) / tt ** 3


@dataclass(frozen=True)
class LemkeCoreODE:
    """Residual of eta^2 tau'' + D Q / (V_f + B) for one model and speed."""

    model: RCDModel
    V_f: float

    def g_over_f(self, u):
        f = self.model.f_fn(self.V_f, u)
        if np.any(f == 0):
            raise DegenerateError("f = V_f + B vanishes")
        return self.model.D(u) * self.model.Q(u) / f

    def u_of_tau(self, tau):
        B = self.model.B(0.0 if self.model.contains(0.0) else _interior(self.model))
        F = self.V_f + float(B)
        if F == 0:
            raise DegenerateError("f = V_f + B0 vanishes")
        return np.asarray(tau, dtype=float) / F

    def residual(self, eta, tau, tau_ee, u=None):
        """eta^2 tau_ee + g/f; ``u`` defaults to tau / (V_f + B0) (constant B only)."""
        if u is None:
            u = self.u_of_tau(tau)
        return np.asarray(eta) ** 2 * tau_ee + self.g_over_f(u)


def _interior(model: RCDModel) -> float:
    lo, hi = model.interval
    if math.isfinite(lo) and math.isfinite(hi):
        return 0.5 * (lo + hi)
    if math.isfinite(lo):
        return lo + 1.0
    if math.isfinite(hi):
        return hi - 1.0
    return 0.0


def lemke_core_ode(model: RCDModel, V_f: float) -> LemkeCoreODE:
    """Residual functional of the Lemke equation for ``model`` at speed ``V_f``.

    Raises:
        DegenerateError: V_f + B vanishes somewhere on the probe grid.
    """
    from .model import probe_grid

    grid = probe_grid(model, 16)
    f = np.asarray(model.f_fn(V_f, grid), dtype=float)
    if np.any(f == 0):
        raise DegenerateError("f = V_f + B vanishes on the validity interval")
    return LemkeCoreODE(model, float(V_f))


def fin_residual(sol: ParametricSolution, t: float, relative: bool = False) -> float:
    """Lemke-equation residual of a Lemke-route solution at parameter t."""
    st: LemkeState = sol.state
    u = sol.u_of(t)
    lhs = st.eta(t) ** 2 * st.tau_ee(t)
    rhs = float(sol.model.D(u) * sol.model.Q(u)) / st.F
    r = lhs + rhs
    if relative:
        return abs(r) / max(abs(lhs), abs(rhs), 1e-300)
    return r


def fin0_identity_gap(state: LemkeState, t: float, method: str = "jet") -> float:
    """Relative gap in d^2eta/dtau^2 = -(d^2tau/deta^2)(deta/dtau)^3 at parameter t.

    The left side is evaluated directly as a function of tau: from the
    parametric jet (``method="jet"``) or by differentiating
    d eta/d tau = eta_t / tau_t numerically in t (``method="fd"``, limited by
    round-off where that ratio is nearly constant). The right side goes
    through d^2 tau/d eta^2.
    """
    _, tt, ttt, _, et, ett = state.jet(t)

    def deta_dtau(s):
        j = state.jet(s)
        return j[4] / j[1]

    if method == "jet":
        direct = state.eta_tautau(t)
    elif method == "fd":
        # keep the stencil well inside the local length scales of tau and eta
        h = 1e-3 * abs(t) if t != 0.0 else 1e-3
        for d1, d2 in ((tt, ttt), (et, ett)):
            if d2 != 0.0:
                h = min(h, 1e-2 * abs(d1 / d2))
        direct = derivative(deta_dtau, t, h) / tt
    else:
        raise ConfigError(f"unknown method {method!r}")
    via = -state.tau_ee(t) * (et / tt) ** 3
    return abs(direct - via) / max(abs(direct), abs(via), 1e-300)


# --------------------------------------------------------------------------
# Lemke parametric assembly


def _constant_F(model: RCDModel, V_f: float) -> float:
    if not model.is_constant_B():
        raise ConfigError("the Lemke cases need a constant convection term B")
    B0 = float(model.B(_interior(model)))
    F = V_f + B0
    if F == 0:
        raise DegenerateError("f = V_f + B0 vanishes")
    return F


def assemble_theorem2(model: RCDModel, V_f: float, state: LemkeState, t0: float,
                      t_range: tuple[float, float], strict: bool = False,
                      tol: Tolerance = DEFAULT_TOL, settings: MarchSettings | None = None,
                      ic: tuple[float, float] | None = None,
                      constants: Mapping | None = None) -> ParametricSolution:
    """Sample the wave carried by ``state`` with xi(t0) = 0.

    u = tau / (V_f + B0) and xi follows from adaptive quadrature of
    d xi/dt = -(D(u) / (V_f + B0)) eta_t / eta between consecutive nodes.
    The walk covers ``t_range`` (ends may be infinite) and stops early where
    u leaves the model's validity interval or eta vanishes.

    Raises:
        DomainError: t0 outside ``t_range`` or eta = 0 at t0.
        InversionError: ``strict`` and the walk stopped before an end.
    """
    settings = settings or MarchSettings()
    if settings.du_floor == 0.0:
        settings = replace(settings, du_floor=1e-8)
    F = _constant_F(model, V_f)
    a, b = sorted(float(x) for x in t_range)
    if not a <= t0 <= b:
        raise DomainError(f"{state.param}0={t0} outside the range [{a}, {b}]")

    def u_of(t):
        return float(model.check(float(state.tau(t)) / F))

    def dxi_dt(t):
        _, _, _, e, et, _ = state.jet(t)
        if e == 0.0:
            raise DomainError(f"eta vanishes at {state.param}={t}")
        return -float(model.D(u_of(t))) / F * et / e

    def du_dt(t):
        return float(state.jet(t)[1]) / F

    def d2u(t):
        # slope = -eta tau_t / (D eta_t); differentiate in t, divide by xi_t
        tau, tt, ttt, e, et, ett = state.jet(t)
        u = u_of(t)
        D = float(model.D(u))
        dD = D * float(model.dlnD_fn(u)) * tt / F
        N, Nt = e * tt, et * tt + e * ttt
        M, Mt = D * et, dD * et + D * ett
        slope_t = -(Nt * M - N * Mt) / (M * M)
        return slope_t / dxi_dt(t)

    u0 = u_of(t0)
    if state.eta(t0) == 0.0:
        raise DomainError(f"eta vanishes at {state.param}0={t0}")
    D_const = _constant_D(model)
    xi_step = None
    if D_const is not None:
        # constant D: xi = -(D0 / F) ln|eta| exactly
        def xi_step(ta, tb):
            ea, eb = state.eta(ta), state.eta(tb)
            if ea == 0.0 or eb == 0.0 or (ea > 0) != (eb > 0):
                raise DomainError("eta vanishes inside the step")
            return -D_const / F * math.log(eb / ea)
    left = march(t0, 0.0, u0, a, u_of, dxi_dt, settings, tol, strict, xi_step)
    right = march(t0, 0.0, u0, b, u_of, dxi_dt, settings, tol, strict, xi_step)
    t, xi, u = assemble(t0, 0.0, u0, left, right)

    def xi_of(s):
        i = int(np.argmin(np.abs(t - s)))
        return float(xi[i] + quad(dxi_dt, t[i], s, tol, vectorized=False))

    c = {"case": state.case.value, "V_f": float(V_f), "F": F, state.param + "0": t0,
         "xi0": 0.0, "stop": [left.stop, right.stop], "params": dict(model.params)}
    c.update(state.constants)
    if constants:
        c.update(constants)
    return ParametricSolution(Route.Lemke, state.param, t, xi, u, c, model, float(V_f),
                              u_of, dxi_dt, du_dt, ic=ic, xi_of=xi_of, d2u=d2u, state=state)


def _case_model(family: Family, D_fn, B0: float, V_f: float, DQ: Callable,
                params: dict, interval=(-math.inf, math.inf)) -> RCDModel:
    if D_fn is None:
        return make_model(family, params)
    B = lambda u: B0 + 0.0 * np.asarray(u, dtype=float)
    Q = lambda u: DQ(u) / D_fn(u)
    return make_custom_model(D_fn, B, Q, interval, params, name=f"{family.value}(custom D)")


def _sign_window(eta0: float) -> tuple[float, float]:
    return (0.0, math.inf) if eta0 > 0 else (-math.inf, 0.0)


def _constant_D(model: RCDModel) -> float | None:
    """D0 when D is constant on the probe grid, else None."""
    from .model import probe_grid

    grid = probe_grid(model, 9)
    d = np.broadcast_to(np.asarray(model.D(grid), dtype=float), grid.shape)
    if np.all(d == d[0]) and d[0] != 0:
        return float(d[0])
    return None


def _check_eta_range(eta_range, eta0: float):
    if eta_range is None:
        return _sign_window(eta0), False
    a, b = sorted(float(x) for x in eta_range)
    if a < 0 < b:
        raise DomainError(f"eta range [{a}, {b}] crosses eta = 0")
    if not a <= eta0 <= b:
        raise DomainError(f"eta range [{a}, {b}] does not contain eta0={eta0}")
    return (a, b), True


# --------------------------------------------------------------------------
# D Q = alpha


def case_constant_DQ(alpha: float, B0: float, V_f: float, ic: tuple[float, float],
                     D_fn: Callable | None = None, eta_range=None, negative_eta: bool = False,
                     model: RCDModel | None = None, tol: Tolerance = DEFAULT_TOL,
                     settings: MarchSettings | None = None) -> ParametricSolution:
    """Wave for D Q = alpha, B = B0, parametrized by eta.

    tau = C2 eta + beta ln|eta| with beta = alpha / F, F = V_f + B0, so that
    u = C2 eta / F + alpha ln|eta| / F^2. The initial data fix

        ln|eta0| = F^2 u0 / alpha + F D(u0) u0' / alpha + 1,
        C2 = -(alpha / F + D(u0) u0') / eta0.

    With alpha = 0 (no reaction) tau = C1 + C2 eta with eta0 = +-1.

    Args:
        D_fn: diffusion closure; default D = 1.
        negative_eta: use the eta < 0 branch.
        model: model to attach; built from ``D_fn`` when omitted.

    Raises:
        DegenerateError: V_f + B0 = 0.
        DomainError: ln|eta0| overflows, or ``eta_range`` crosses 0.
    """
    F = V_f + B0
    if F == 0:
        raise DegenerateError("f = V_f + B0 vanishes")
    if model is None:
        model = _case_model(Family.ConstantDQ, D_fn, B0, V_f,
                            lambda u: alpha + 0.0 * np.asarray(u, dtype=float),
                            {"D0": 1.0, "B0": B0, "alpha": alpha})
    u0, du0 = float(ic[0]), float(ic[1])
    D0 = float(model.D(model.check(u0)))
    sgn = -1.0 if negative_eta else 1.0
    beta = alpha / F
    if alpha == 0.0:
        eta0, C2 = sgn, -D0 * du0 * sgn
        C1 = F * u0 - C2 * eta0
        note = "alpha = 0: pure convection, tau = C1 + C2 eta"
    else:
        log_eta0 = F * F * u0 / alpha + F * D0 * du0 / alpha + 1.0
        if log_eta0 > 700.0 or log_eta0 < -700.0:
            raise DomainError(f"ln|eta0| = {log_eta0:.6g} is outside the floating-point range")
        eta0 = sgn * math.exp(log_eta0)
        C1 = 0.0
        C2 = -(alpha / F + D0 * du0) / eta0
        note = ""

    def jet(e):
        if e == 0.0:
            raise DomainError("eta = 0 is singular")
        return (C1 + C2 * e + beta * math.log(abs(e)), C2 + beta / e, -beta / (e * e),
                e, 1.0, 0.0)

    rng, strict = _check_eta_range(eta_range, eta0)
    state = LemkeState(LemkeCase.ConstantDQ, "eta",
                       {"alpha": alpha, "beta": beta, "C1": C1, "C2": C2, "eta0": eta0}, jet, F)
    sol = assemble_theorem2(model, V_f, state, eta0, rng, strict, tol, settings, ic=(u0, du0))
    if note:
        sol.notes.append(note)
    return sol


def constant_dq_xi(sol: ParametricSolution, eta: float, tol: Tolerance = DEFAULT_TOL) -> float:
    """xi(eta) = -(1/F) int_{eta0}^{eta} D(u(psi)) / psi d psi, eta as parameter."""
    c = sol.constants
    F = c["F"]
    return -quad(lambda p: float(sol.model.D(sol.u_of(p))) / p, c["eta0"], eta, tol,
                 vectorized=False) / F


# --------------------------------------------------------------------------
# D Q = beta tau + alpha


def linear_dq_exponents(beta: float, F: float) -> tuple[float, float]:
    """(m+, m-) with 2 m+- = 1 +- sqrt(1 - 4 beta / F).

    Raises:
        DomainError: complex exponents (4 beta / F > 1) or a double root.
    """
    disc = 1.0 - 4.0 * beta / F
    if disc < -DOUBLE_ROOT_TOL:
        raise DomainError(f"4 beta / (V_f + B0) = {1 - disc:.6g} > 1 gives complex exponents")
    if abs(disc) <= DOUBLE_ROOT_TOL:
        raise DomainError("m+ = m- (4 beta = V_f + B0): the double-root case is not supported")
    r = math.sqrt(disc)
    return 0.5 * (1.0 + r), 0.5 * (1.0 - r)


def linear_dq_explicit_constants(alpha, beta, F, eta0, u0, du_deta0, mp, mm):
    """c1, c2 from the closed-form expressions in terms of u0 and du/deta at eta0."""
    s = alpha + beta * u0 * F
    c1 = eta0 ** (-mp) * (mm * s - beta * eta0 * du_deta0 * F) / (beta * (mm - mp))
    c2 = eta0 ** (-mm) * (beta * eta0 * du_deta0 * F - mp * s) / (beta * (mm - mp))
    return c1, c2


def case_linear_DQ(alpha: float, beta: float, B0: float, V_f: float, ic: tuple[float, float],
                   D_fn: Callable | None = None, eta_range=None, eta0: float = 1.0,
                   model: RCDModel | None = None, tol: Tolerance = DEFAULT_TOL,
                   settings: MarchSettings | None = None) -> ParametricSolution:
    """Wave for D Q = beta tau + alpha, B = B0, parametrized by eta > 0.

    tau = c1 eta^m+ + c2 eta^m- - alpha / beta. eta0 only sets the scale of
    eta and is fixed to 1 by default; c1 and c2 come from a 2x2 solve of
    tau(eta0) = F u0 and eta0 tau'(eta0) = -D(u0) u0', and are cross-checked
    against the closed-form expressions (``closed_form_dev``).

    Raises:
        DomainError: complex or repeated exponents, eta0 <= 0.
    """
    F = V_f + B0
    if F == 0:
        raise DegenerateError("f = V_f + B0 vanishes")
    if beta == 0.0:
        sol = case_constant_DQ(alpha, B0, V_f, ic, D_fn, eta_range, model=model, tol=tol,
                               settings=settings)
        sol.notes.append("beta = 0: solved as D Q = alpha")
        return sol
    if eta0 <= 0:
        raise DomainError("eta0 must be positive (real powers of eta)")
    mp, mm = linear_dq_exponents(beta, F)
    if model is None:
        model = _case_model(Family.LinearDQ, D_fn, B0, V_f,
                            lambda u: beta * F * np.asarray(u, dtype=float) + alpha,
                            {"D0": 1.0, "B0": B0, "alpha": alpha, "beta": beta, "V_f": V_f})
    u0, du0 = float(ic[0]), float(ic[1])
    D0 = float(model.D(model.check(u0)))
    S = F * u0 + alpha / beta
    T = -D0 * du0
    A = np.array([[eta0 ** mp, eta0 ** mm], [mp * eta0 ** mp, mm * eta0 ** mm]])
    c1, c2 = (float(x) for x in np.linalg.solve(A, [S, T]))
    p1, p2 = linear_dq_explicit_constants(alpha, beta, F, eta0, u0, T / (eta0 * F), mp, mm)
    dev = max(abs(p1 - c1), abs(p2 - c2)) / max(1.0, abs(c1), abs(c2))
    shift = alpha / beta

    def jet(e):
        if e <= 0.0:
            raise DomainError("eta must stay positive")
        a1, a2 = c1 * e ** mp, c2 * e ** mm
        return (a1 + a2 - shift, (mp * a1 + mm * a2) / e,
                (mp * (mp - 1) * a1 + mm * (mm - 1) * a2) / (e * e), e, 1.0, 0.0)

    if eta_range is None:
        rng, strict = (0.0, math.inf), False
    else:
        rng, strict = _check_eta_range(eta_range, eta0)
    state = LemkeState(LemkeCase.LinearDQ, "eta",
                       {"alpha": alpha, "beta": beta, "c1": c1, "c2": c2, "m_plus": mp,
                        "m_minus": mm, "eta0": eta0}, jet, F)
    return assemble_theorem2(model, V_f, state, eta0, rng, strict, tol, settings, ic=(u0, du0),
                             constants={"closed_form_dev": dev})


# --------------------------------------------------------------------------
# D Q = K (V_f + B0) / tau


def inverse_dq_excluded_theta(k2: float) -> float | None:
    """theta where (sqrt(pi)/2) erf(theta) + k2 = 0, or None if it never vanishes."""
    if abs(k2) >= SQRT_PI_2:
        return None
    return find_root(lambda t: SQRT_PI_2 * erf(t) + k2, -7.0, 7.0)


def fit_inverse_constants(K: float, F: float, D_u0: float,
                          ic: tuple[float, float]) -> tuple[float, float]:
    """(k2, theta0) reproducing (u0, u0') with k1 = 1.

    From F u0 = sqrt(K/2) e^{-theta0^2} / P and
    D u0' = -sqrt(2K) theta0 - F u0, with P = (sqrt(pi)/2) erf(theta0) + k2.
    """
    u0, du0 = float(ic[0]), float(ic[1])
    if u0 == 0.0:
        raise DegenerateError("u0 = 0 is not reached at finite theta")
    s = math.sqrt(K / 2.0)
    theta0 = -(D_u0 * du0 + F * u0) / (2.0 * s)
    P0 = s * math.exp(-theta0 * theta0) / (F * u0)
    return P0 - SQRT_PI_2 * erf(theta0), theta0


def case_inverse_DQ(K: float, B0: float, V_f: float, k1: float, k2: float,
                    D_fn: Callable | None = None, theta_range=(-3.0, 3.0),
                    theta0: float | None = None, model: RCDModel | None = None,
                    tol: Tolerance = DEFAULT_TOL,
                    settings: MarchSettings | None = None) -> ParametricSolution:
    """Wave for D Q = K (V_f + B0) / tau (Emden-Fowler form eta^2 tau'' + K / tau = 0).

    eta = k1 / P, tau = sqrt(K/2) P'/P with P = (sqrt(pi)/2) erf(theta) + k2,
    so u = tau / F and d xi/d theta = D e^{-theta^2} / (F P).

    Args:
        theta0: parameter value placed at xi = 0 (default: middle of the range).

    Raises:
        DomainError: K <= 0, k1 = 0, or P vanishing inside ``theta_range``.
    """
    if K == 0:
        raise DomainError("K = 0 makes tau vanish identically")
    if K < 0:
        raise DomainError("K < 0 gives an imaginary prefactor sqrt(K/2)")
    if k1 == 0:
        raise DomainError("k1 = 0 makes eta vanish identically")
    F = V_f + B0
    if F == 0:
        raise DegenerateError("f = V_f + B0 vanishes")
    a, b = sorted(float(x) for x in theta_range)
    excl = inverse_dq_excluded_theta(k2)
    if excl is not None and a <= excl <= b:
        raise DomainError(f"(sqrt(pi)/2) erf + k2 vanishes at theta={excl:.12g} inside "
                          f"[{a}, {b}]")
    if theta0 is None:
        theta0 = 0.5 * (a + b)
    if model is None:
        model = _case_model(Family.InverseDQ, D_fn, B0, V_f,
                            lambda u: K / np.asarray(u, dtype=float),
                            {"D0": 1.0, "B0": B0, "K": K})
    s = math.sqrt(K / 2.0)

    def jet(t):
        E = math.exp(-t * t)
        P = SQRT_PI_2 * erf(t) + k2
        if P == 0.0:
            raise DomainError(f"theta={t} is excluded (eta = infinity)")
        P1, P2, P3 = E, -2.0 * t * E, (4.0 * t * t - 2.0) * E
        r = P1 / P
        tau = s * r
        tau_t = s * (P2 / P - r * r)
        tau_tt = s * (P3 / P - 3.0 * P2 * P1 / (P * P) + 2.0 * r ** 3)
        eta = k1 / P
        eta_t = -k1 * P1 / (P * P)
        eta_tt = -k1 * (P2 / (P * P) - 2.0 * P1 * P1 / P ** 3)
        return tau, tau_t, tau_tt, eta, eta_t, eta_tt

    state = LemkeState(LemkeCase.InverseDQ, "theta",
                       {"K": K, "k1": k1, "k2": k2, "excluded_theta": excl}, jet, F)
    return assemble_theorem2(model, V_f, state, float(theta0), (a, b), False, tol, settings)


def inverse_dq_tau_explicit(K: float, k2: float, theta):
    """sqrt(K/2) e^{-theta^2} / ((sqrt(pi)/2) erf(theta) + k2)."""
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    P = SQRT_PI_2 * np.array([erf(x) for x in th]) + k2
    out = math.sqrt(K / 2.0) * np.exp(-th * th) / P
    return out if np.ndim(theta) else float(out[0])


# --------------------------------------------------------------------------
# D Q / F = 2(m+1)/(m+3)^2 tau - A tau^m


def _check_m(m: float):
    if m in (-3.0, -1.0, 1.0):
        raise DomainError(f"m={m} is excluded (m != -3, -1, 1)")


def radicand_window(m: float, sign: float) -> tuple[float, float]:
    """Open theta-interval on which 1 +- theta^(m+1) is real and positive."""
    e = m + 1.0
    plus = sign > 0
    if not e.is_integer() or e < 0:
        # real powers need theta > 0; negative powers blow up at 0
        if e > 0:
            return (0.0, math.inf) if plus else (0.0, 1.0)
        return (0.0, math.inf) if plus else (1.0, math.inf)
    if int(e) % 2 == 0:
        return (-math.inf, math.inf) if plus else (-1.0, 1.0)
    return (-1.0, math.inf) if plus else (-math.inf, 1.0)


class PowerLawIntegral:
    """I(theta) = int_0^theta d psi / sqrt(1 +- psi^(m+1)) by adaptive quadrature.

    Values are cached; a new theta is integrated from the nearest cached
    node, so walking along a curve costs one short quadrature per point.
    """

    def __init__(self, m: float, sign: float, tol: Tolerance = DEFAULT_TOL):
        self.m, self.s, self.tol = float(m), math.copysign(1.0, sign), tol
        self.window = radicand_window(m, sign)
        self._nodes = [0.0] if self.window[0] <= 0.0 <= self.window[1] else []
        self._vals = [0.0] if self._nodes else []

    def radicand(self, psi):
        return 1.0 + self.s * np.asarray(psi, dtype=float) ** (self.m + 1.0)

    def integrand(self, psi):
        R = self.radicand(psi)
        if np.any(R <= 0):
            raise DomainError(f"radicand 1 {'+' if self.s > 0 else '-'} psi^(m+1) <= 0")
        return 1.0 / np.sqrt(R)

    def __call__(self, theta: float) -> float:
        lo, hi = self.window
        theta = float(theta)
        if not lo <= theta <= hi:
            raise DomainError(f"theta={theta} outside the radicand window ({lo}, {hi})")
        if not self._nodes:
            return quad(self.integrand, 0.0, theta, self.tol)
        i = bisect.bisect_left(self._nodes, theta)
        if i < len(self._nodes) and self._nodes[i] == theta:
            return self._vals[i]
        j = min((k for k in (i - 1, i) if 0 <= k < len(self._nodes)),
                key=lambda k: abs(self._nodes[k] - theta))
        val = self._vals[j] + quad(self.integrand, self._nodes[j], theta, self.tol)
        self._nodes.insert(i, theta)
        self._vals.insert(i, val)
        return val

    def direct(self, theta: float) -> float:
        """I(theta) from a single quadrature over [0, theta], bypassing the cache."""
        return quad(self.integrand, 0.0, float(theta), self.tol)

    def hypergeometric(self, theta: float) -> float:
        """theta 2F1(1/2, 1/(m+1); 1+1/(m+1); -+theta^(m+1)), the series form of I."""
        e = self.m + 1.0
        return theta * hyp2f1(0.5, 1.0 / e, 1.0 + 1.0 / e, -self.s * theta ** e)


def fit_powerlaw_constants(m: float, sign: float, b: float, F: float, D_u0: float,
                           ic: tuple[float, float], integral: PowerLawIntegral | None = None,
                           search_max: float = 50.0, samples: int = 400):
    """(theta0, l2) reproducing (u0, u0') for the power-law case.

    With J = I + l2 and p = 2/(m-1) the conditions F u0 = b theta0 |J0|^p and
    D u0' = -(b |J0|^p / (m+3)) ((m-1) J0 sqrt(R0) + 2 theta0) give J0 as a
    function of theta0; the remaining scalar equation is solved by scanning
    for sign changes and refining with Brent. All roots found are returned
    as the third element; the one closest to 0 is used.

    Raises:
        ICSolveError: no root in the search box.
    """
    _check_m(m)
    I = integral or PowerLawIntegral(m, sign)
    u0, du0 = float(ic[0]), float(ic[1])
    if u0 == 0.0:
        raise DegenerateError("u0 = 0 puts theta0 at the origin where J0 is undetermined")
    p = 2.0 / (m - 1.0)
    side = math.copysign(1.0, F * u0)
    lo, hi = I.window
    edge = hi if side > 0 else -lo
    edge = min(edge, search_max)
    if edge <= 0:
        raise ICSolveError("the radicand window has no room on the side of sign(F u0)")

    def J0_of(th):
        R = float(I.radicand(th))
        return -th * ((m + 3.0) * D_u0 * du0 / (F * u0) + 2.0) / ((m - 1.0) * math.sqrt(R))

    def g(th):
        return b * th * abs(J0_of(th)) ** p - F * u0

    grid = side * np.geomspace(1e-8, edge * (1.0 - 1e-9), samples)
    vals = []
    for th in grid:
        try:
            vals.append(g(th))
        except (AbelWaveError, ValueError, ZeroDivisionError, OverflowError):
            vals.append(math.nan)
    roots = []
    for i in range(len(grid) - 1):
        va, vb = vals[i], vals[i + 1]
        if math.isfinite(va) and math.isfinite(vb) and va * vb <= 0:
            try:
                roots.append(find_root(g, grid[i], grid[i + 1]))
            except BracketError:
                pass
    if not roots:
        raise ICSolveError(f"no theta0 in (0, {side * edge:.6g}] reproduces ic={ic}")
    th0 = min(roots, key=abs)
    l2 = J0_of(th0) - I(th0)
    return th0, l2, roots


def powerlaw_j_zero(I: PowerLawIntegral, l2: float) -> float | None:
    """theta with I(theta) = -l2 (I is increasing), or None inside the window."""
    target = -l2
    if target == 0.0:
        return 0.0
    step = 1.0 if target > 0 else -1.0
    edge = I.window[1] if target > 0 else I.window[0]
    if step * edge <= 0:
        return None
    a, b = 0.0, step
    while True:
        if math.isfinite(edge) and abs(b) >= abs(edge):
            b = edge * (1.0 - 1e-12)
        try:
            if (I(b) - target) * step >= 0:
                return find_root(lambda t: I(t) - target, min(a, b), max(a, b))
        except DomainError:
            return None
        if (math.isfinite(edge) and b == edge * (1.0 - 1e-12)) or abs(b) > 1e8:
            return None
        a, b = b, 2.0 * b


def case_powerlaw_DQ(m: float, sign: float, b: float, B0: float, V_f: float, l1: float,
                     l2: float, D_fn: Callable | None = None, theta_range=None,
                     theta0: float | None = None, model: RCDModel | None = None,
                     tol: Tolerance = DEFAULT_TOL, settings: MarchSettings | None = None,
                     hyp_check: bool = True) -> ParametricSolution:
    """Wave for D Q / F = 2(m+1)/(m+3)^2 tau - A tau^m, B = B0.

    With J = I(theta) + l2, I(theta) = int_0^theta d psi / sqrt(1 +- psi^(m+1)):

        eta = l1 sgn(J) |J|^((m+3)/(m-1)),   tau = b theta |J|^(2/(m-1)),
        A = +-(m+1)(m-1)^2 b^(1-m) / (2 (m+3)^2).

    The lower limit 0 of I is a convention; any other limit shifts l2. I is
    evaluated by quadrature and compared against its 2F1 form on the sampled
    nodes (``hyp2f1_dev``).

    Args:
        theta_range: parameter window; default is the component of theta0
            bounded by the radicand window and the zero of J.
        theta0: parameter at xi = 0 (default: middle of ``theta_range``, or 1).

    Raises:
        DomainError: excluded m, b <= 0, l1 = 0, a radicand <= 0 or J = 0
            inside ``theta_range``.
    """
    _check_m(m)
    if b <= 0:
        raise DomainError("b must be > 0")
    if l1 == 0:
        raise DomainError("l1 = 0 makes eta vanish identically")
    F = V_f + B0
    if F == 0:
        raise DegenerateError("f = V_f + B0 vanishes")
    s = math.copysign(1.0, sign)
    A = powerlaw_dq_A(m, b, s)
    cm = powerlaw_dq_coefficient(m)
    I = PowerLawIntegral(m, s, tol)
    win = I.window
    jz = powerlaw_j_zero(I, l2)
    if theta_range is None:
        if theta0 is None:
            theta0 = 1.0 if win[0] < 1.0 < win[1] else 0.5 * (win[0] + min(win[1], win[0] + 2))
        lo, hi = win
        if jz is not None:
            if jz > theta0:
                hi = jz
            else:
                lo = jz
        strict = False
    else:
        lo, hi = sorted(float(x) for x in theta_range)
        if lo < win[0] or hi > win[1]:
            raise DomainError(f"theta range [{lo}, {hi}] leaves the radicand window {win}")
        if jz is not None and lo <= jz <= hi:
            raise DomainError(f"J = I + l2 vanishes at theta={jz:.12g} inside [{lo}, {hi}]")
        if theta0 is None:
            theta0 = 0.5 * (lo + hi)
        strict = True
    if model is None:
        model = _case_model(Family.PowerLawDQ, D_fn, B0, V_f,
                            lambda u: F * (cm * F * np.asarray(u, dtype=float)
                                           - A * (F * np.asarray(u, dtype=float)) ** m),
                            {"D0": 1.0, "B0": B0, "m": m, "b": b, "sign": s, "V_f": V_f})
    p = 2.0 / (m - 1.0)
    q = (m + 3.0) / (m - 1.0)
    e = m + 1.0

    def jet(t):
        R = float(I.radicand(t))
        if R <= 0:
            raise DomainError(f"radicand <= 0 at theta={t}")
        J = I(t) + l2
        if J == 0.0:
            raise DomainError(f"J = 0 at theta={t}")
        J1 = R ** -0.5
        J2 = -0.5 * R ** -1.5 * s * e * t ** m
        aJ = abs(J)
        Jp = aJ ** p
        tau = b * t * Jp
        tau_t = b * Jp + b * t * p * Jp * J1 / J
        tau_tt = (2.0 * b * p * Jp * J1 / J
                  + b * t * p * ((p - 1.0) * Jp * J1 * J1 / (J * J) + Jp * J2 / J))
        Jq1 = aJ ** (q - 1.0)
        eta = l1 * math.copysign(aJ ** q, J)
        eta_t = l1 * q * Jq1 * J1
        eta_tt = l1 * q * ((q - 1.0) * Jq1 / J * J1 * J1 + Jq1 * J2)
        return tau, tau_t, tau_tt, eta, eta_t, eta_tt

    state = LemkeState(LemkeCase.PowerLawDQ, "theta",
                       {"m": m, "sign": s, "b": b, "A": A, "l1": l1, "l2": l2,
                        "J_zero": jz}, jet, F)
    sol = assemble_theorem2(model, V_f, state, float(theta0), (lo, hi), strict, tol, settings)
    if hyp_check:
        dev = 0.0
        for t in sol.t[:: max(1, len(sol.t) // 40)]:
            try:
                dev = max(dev, abs(I.direct(t) - I.hypergeometric(t)))
            except (DomainError, AbelWaveError):
                continue
        sol.constants["hyp2f1_dev"] = dev
    return sol


# --------------------------------------------------------------------------
# power-law reaction model in its rescaled travelling-wave form


def powerlaw_reaction_b(m: float, V: float) -> float:
    """b = [(m-1)^2 (m+1) (V+1)^2 / (2 (m+3)^2)]^(1/(m-1))."""
    _check_m(m)
    base = (m - 1.0) ** 2 * (m + 1.0) * (V + 1.0) ** 2 / (2.0 * (m + 3.0) ** 2)
    if base <= 0:
        raise DomainError(f"b undefined: base {base:.6g} <= 0 for m={m}")
    return base ** (1.0 / (m - 1.0))


def powerlaw_reaction_model(m: float, V: float) -> RCDModel:
    """D = 1, f = 1, Q = 2(m+1)/(m+3)^2 U - U^m / (V+1)^2 as a PowerLawDQ instance."""
    b = powerlaw_reaction_b(m, V)
    return make_model(Family.PowerLawDQ,
                      {"D0": 1.0, "B0": 1.0, "m": m, "b": b, "sign": 1.0, "V_f": 0.0})


def powerlaw_reaction_slope(m: float, b: float, theta0: float, l2: float) -> float:
    """U0' from the closed-form expression in theta0 and l2 (D = f = 1)."""
    e = m + 1.0
    h = theta0 * hyp2f1(0.5, 1.0 / e, 1.0 + 1.0 / e, -theta0 ** e)
    J = h + l2
    r = math.sqrt(theta0 ** e + 1.0)
    return -(b / (m + 3.0)) * abs(J) ** (2.0 / (m - 1.0)) * (
        2.0 * theta0 + theta0 * (m - 1.0) * r * (h / theta0) + l2 * (m - 1.0) * r)


def powerlaw_reaction_solution(m: float, V: float, ic: tuple[float, float],
                               theta_range=None, tol: Tolerance = DEFAULT_TOL,
                               settings: MarchSettings | None = None) -> ParametricSolution:
    """Exact wave of U'' + U' + 2(m+1)/(m+3)^2 U - U^m / (V+1)^2 = 0 through (U0, U0').

    This is the travelling-wave equation of the dimensionless power-law
    reaction model with lambda = (V+1)^2, in the variable xi (V+1). theta0
    and l2 are solved from the initial data (``fit_powerlaw_constants``);
    the closed-form slope expression and the xi0 relation
    U0 = b theta0 exp(2 xi0 / (m+3)) are stored as cross-checks.

    Raises:
        ICSolveError: the initial data admit no (theta0, l2).
    """
    _check_m(m)
    b = powerlaw_reaction_b(m, V)
    model = powerlaw_reaction_model(m, V)
    I = PowerLawIntegral(m, 1.0, tol)
    U0, dU0 = float(ic[0]), float(ic[1])
    theta0, l2, roots = fit_powerlaw_constants(m, 1.0, b, 1.0, 1.0, (U0, dU0), I)
    sol = case_powerlaw_DQ(m, 1.0, b, 1.0, 0.0, 1.0, l2, None, theta_range, theta0, model,
                           tol, settings)
    c = sol.constants
    J0 = I(theta0) + l2
    c.update({"V": V, "lambda": (V + 1.0) ** 2, "xi_scale": 1.0 / (V + 1.0),
              "theta0_roots": [float(r) for r in roots],
              "xi0_formula": 0.5 * (m + 3.0) * math.log(U0 / (b * theta0)),
              "xi0_from_J": (m + 3.0) / (m - 1.0) * math.log(abs(J0))})
    try:
        c["slope_formula_dev"] = abs(powerlaw_reaction_slope(m, b, theta0, l2) - dU0)
    except (DomainError, AbelWaveError):
        c["slope_formula_dev"] = math.nan
    sol.ic = (U0, dU0)
    return sol


def powerlaw_reaction_xi(theta, l2: float, m: float, I: PowerLawIntegral | None = None):
    """-(m+3)/(m-1) ln|I(theta) + l2|, the closed-form xi(theta) - xi0."""
    I = I or PowerLawIntegral(m, 1.0)
    th = np.atleast_1d(np.asarray(theta, dtype=float))
    out = np.array([-(m + 3.0) / (m - 1.0) * math.log(abs(I(t) + l2)) for t in th])
    return out if np.ndim(theta) else float(out[0])


# --------------------------------------------------------------------------
# dispatch from a model


def solve_lemke(model: RCDModel, V_f: float, ic: tuple[float, float],
                tol: Tolerance = DEFAULT_TOL, settings: MarchSettings | None = None,
                **options) -> ParametricSolution:
    """Route a Lemke-family model and initial data to its case solver.

    Raises:
        ConfigError: a family outside the Lemke cases, or a model whose own
            V_f parameter differs from ``V_f``.
    """
    fam = model.family
    p = model.params
    if fam not in (Family.ConstantDQ, Family.LinearDQ, Family.InverseDQ, Family.PowerLawDQ):
        raise ConfigError(f"{fam.value} is not a Lemke case")
    if "V_f" in p and abs(p["V_f"] - V_f) > 1e-12 * max(1.0, abs(V_f)):
        raise ConfigError(f"{fam.value}: model built for V_f={p['V_f']}, asked for {V_f}")
    B0 = p["B0"]
    if fam is Family.ConstantDQ:
        return case_constant_DQ(p["alpha"], B0, V_f, ic, model.D, model=model, tol=tol,
                                settings=settings, **options)
    if fam is Family.LinearDQ:
        return case_linear_DQ(p["alpha"], p["beta"], B0, V_f, ic, model.D, model=model,
                              tol=tol, settings=settings, **options)
    F = V_f + B0
    D_u0 = float(model.D(model.check(float(ic[0]))))
    if fam is Family.InverseDQ:
        k2, theta0 = fit_inverse_constants(p["K"], F, D_u0, ic)
        rng = options.pop("theta_range", (theta0 - 3.0, theta0 + 3.0))
        excl = inverse_dq_excluded_theta(k2)
        if excl is not None and rng[0] <= excl <= rng[1]:
            rng = (excl, rng[1]) if excl < theta0 else (rng[0], excl)
            rng = (rng[0] + 1e-9 * (1 + abs(rng[0])), rng[1]) if excl < theta0 else \
                (rng[0], rng[1] - 1e-9 * (1 + abs(rng[1])))
        sol = case_inverse_DQ(p["K"], B0, V_f, 1.0, k2, model.D, rng, theta0, model, tol,
                              settings)
        sol.ic = (float(ic[0]), float(ic[1]))
        return sol
    I = PowerLawIntegral(p["m"], p["sign"], tol)
    theta0, l2, roots = fit_powerlaw_constants(p["m"], p["sign"], p["b"], F, D_u0, ic, I)
    sol = case_powerlaw_DQ(p["m"], p["sign"], p["b"], B0, V_f, 1.0, l2, model.D,
                           options.pop("theta_range", None), theta0, model, tol, settings)
    sol.constants["theta0_roots"] = [float(r) for r in roots]
    sol.ic = (float(ic[0]), float(ic[1]))
    return sol
