"""Integrable travelling waves when d/du (g/f) = k f.

With f = V_f + B and g = D Q the Abel equation integrates in the parameter
theta = g w / f, giving

    g/f = C^-1 e^{F(theta, k)},   dF/dtheta = k / (theta (theta^2 + theta + k)),
    dxi/dtheta = D / (f (theta^2 + theta + k)),
    du/dtheta = D Q / (f^2 theta (theta^2 + theta + k)).

The singular points theta = 0 and the real roots of theta^2 + theta + k cut
the theta-line into components; a solution lives inside the component that
contains its initial theta.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import (AbelWaveError, ConfigError, DegenerateError, DomainError,
                     InversionError, SingularityError)
from .model import (AbelForm, Family, RCDModel, abel_reduce, make_model, probe_grid)
from .numerics import DEFAULT_TOL, Tolerance, derivative, find_root, quad
from .sampling import MarchSettings, assemble, march
from .solution import ParametricSolution, Route

QUARTER_TOL = 1e-12
DETECT_TOL = Tolerance(rel=1e-8, abs=1e-12)


class Branch(str, enum.Enum):
    KgtQuarter = "k>1/4"
    KeqQuarter = "k=1/4"
    KltQuarter = "k<1/4"


def branch_of(k: float) -> Branch:
    if abs(k - 0.25) <= QUARTER_TOL:
        return Branch.KeqQuarter
    return Branch.KgtQuarter if k > 0.25 else Branch.KltQuarter


# --------------------------------------------------------------------------
# F(theta, k)


def singular_points(k: float) -> list[float]:
    """theta = 0 plus the real roots of theta^2 + theta + k, ascending."""
    br = branch_of(k)
    pts = [0.0]
    if br is Branch.KeqQuarter:
        pts.append(-0.5)
    elif br is Branch.KltQuarter:
        r = math.sqrt(1.0 - 4.0 * k)
        pts += [(-1.0 - r) / 2.0, (-1.0 + r) / 2.0]
    return sorted(set(pts))


def theta_quadratic(theta, k: float):
    """theta^2 + theta + k, factored through its real roots to keep relative accuracy near them."""
    th = np.asarray(theta, dtype=float)
    br = branch_of(k)
    if br is Branch.KeqQuarter:
        return (th + 0.5) ** 2
    if br is Branch.KltQuarter:
        r = math.sqrt(1.0 - 4.0 * k)
        lo, hi = (-1.0 - r) / 2.0, k / ((-1.0 - r) / 2.0)
        return (th - lo) * (th - hi)
    return th * th + th + k


def theta_component(theta0: float, k: float) -> tuple[float, float]:
    """Open interval between consecutive singular points that holds theta0."""
    pts = singular_points(k)
    if any(theta0 == p for p in pts) or theta0 * theta0 + theta0 + k == 0.0:
        raise SingularityError(f"theta0={theta0} is a singular point for k={k}")
    lo, hi = -math.inf, math.inf
    for p in pts:
        if p < theta0:
            lo = p
        elif p > theta0:
            hi = p
            break
    return lo, hi


def log_exp_F(theta, k: float):
    """(sign, log|e^F|) of e^{F(theta, k)}; works on scalars and arrays.

    Written as a sign and a logarithm because e^F spans hundreds of decades
    near the singular points. For k < 1/4 the real antiderivative
    ln|theta| - 1/2 ln|theta^2+theta+k| + ln|(1+2theta+r)/(1+2theta-r)|/(2r),
    r = sqrt(1-4k), is used; it equals the inverse-hyperbolic form wherever
    that form is real.

    Raises:
        SingularityError: theta = 0 or a real root of theta^2 + theta + k.
    """
    th = np.asarray(theta, dtype=float)
    quad_ = theta_quadratic(th, k)
    q = 1.0 + 2.0 * th
    br = branch_of(k)
    with np.errstate(divide="ignore", invalid="ignore"):
        if br is Branch.KeqQuarter:
            bad = (th == 0) | (q == 0)
        else:
            bad = (th == 0) | (quad_ == 0)
        if np.any(bad):
            raise SingularityError(f"e^F singular at theta={np.ravel(th[bad] if th.ndim else th)[:3]}"
                                   f" for k={k}")
        if br is Branch.KgtQuarter:
            s = math.sqrt(4.0 * k - 1.0)
            logabs = np.log(np.abs(th)) - 0.5 * np.log(quad_) - np.arctan(q / s) / s
            sign = np.sign(th)
        elif br is Branch.KeqQuarter:
            logabs = np.log(np.abs(th)) - np.log(np.abs(q)) + 1.0 / q
            sign = np.sign(th) * np.sign(q)
        else:
            r = math.sqrt(1.0 - 4.0 * k)
            lo = (-1.0 - r) / 2.0
            hi = k / lo
            # (1+2theta+r)/(1+2theta-r) = (theta-lo)/(theta-hi)
            logabs = (np.log(np.abs(th)) - 0.5 * np.log(np.abs(quad_))
                      + np.log(np.abs((th - lo) / (th - hi))) / (2.0 * r))
            sign = np.sign(th)
    if th.ndim == 0:
        return float(sign), float(logabs)
    return sign, logabs


def exp_F(theta, k: float):
    """e^{F(theta, k)} for the branch selected by k (may over/underflow to inf/0)."""
    sign, logabs = log_exp_F(theta, k)
    with np.errstate(over="ignore"):
        return sign * np.exp(logabs)


def dF_dtheta(theta, k: float):
    th = np.asarray(theta, dtype=float)
    return k / (th * theta_quadratic(th, k))


# --------------------------------------------------------------------------
# k detection


@dataclass(frozen=True)
class ChielliniCertificate:
    """Evidence that d/du (g/f) = k f on a probe grid.

    ``C1`` and ``C2`` are the constants of the two integrated forms
    D Q = f (C1 + k V_f u + k int B du) and
    f = +-D Q / sqrt(C2 + 2k int D Q du), with the integrals taken from
    ``u_ref``. ``residual`` is max |d/du(g/f) - k f| on the grid.
    """

    k: float
    C1: float
    C2: float
    residual: float
    branch: Branch
    u_ref: float = 0.0
    spread: float = 0.0

    def __post_init__(self):
        if branch_of(self.k) is not self.branch:
            raise ValueError(f"branch {self.branch} inconsistent with k={self.k}")


def certificate_for(k: float, C1: float = math.nan, C2: float = math.nan) -> ChielliniCertificate:
    """A certificate for a family whose k is known in closed form."""
    return ChielliniCertificate(k=float(k), C1=C1, C2=C2, residual=0.0, branch=branch_of(k))


def _fd_step(u: float, lo: float, hi: float) -> float:
    h = 1e-3 * max(1.0, abs(u))
    room = min(u - lo, hi - u)
    return min(h, 0.5 * room) if room > 0 else h


def detect_k(abel: AbelForm, u_grid=None, tol: Tolerance = DETECT_TOL) -> ChielliniCertificate | None:
    """Test the Chiellini condition numerically.

    Pointwise estimates k(u) = [d/du (g/f)] / f use extrapolated central
    differences. The condition holds when their spread is within
    ``tol.rel`` of their size; the two integrated forms are then checked
    for constancy as well.

    Returns:
        A certificate, or None if the condition fails (or k = 0).

    Raises:
        DegenerateError: f vanishes on the grid.
        DomainError: grid outside the validity interval or fewer than 8 points.
    """
    model = abel.model
    grid = probe_grid(model, 16) if u_grid is None else np.asarray(u_grid, dtype=float)
    if grid.ndim != 1 or len(grid) < 8:
        raise DomainError("detect_k needs a 1-D grid of at least 8 points")
    model.check(grid)
    f = np.asarray(abel.f_fn(grid), dtype=float)
    if np.any(f == 0) or np.any(np.abs(f) <= 1e-300):
        raise DegenerateError("f = V_f + B vanishes on the probe grid")
    lo, hi = model.interval
    ratio = lambda u: float(abel.ratio(u))
    dr = np.array([derivative(ratio, u, _fd_step(u, lo, hi)) for u in grid])
    ks = dr / f
    k = float(np.median(ks))
    spread = float(np.max(np.abs(ks - k)))
    scale = float(np.max(np.abs(ks)))
    if scale == 0.0 or spread > tol.rel * scale + tol.abs:
        return None

    u_ref = float(grid[0])
    Vf = abel.V_f
    r = np.asarray(abel.ratio(grid), dtype=float)
    intB = np.array([quad(lambda s: np.asarray(model.B(s), dtype=float), u_ref, u, tol=DEFAULT_TOL)
                     for u in grid])
    intDQ = np.array([quad(lambda s: np.asarray(abel.g_fn(s), dtype=float), u_ref, u, tol=DEFAULT_TOL)
                      for u in grid])
    c1 = r - k * Vf * grid - k * intB
    c2 = r * r - 2.0 * k * intDQ
    for name, c, ref in (("C1", c1, np.abs(r)), ("C2", c2, r * r)):
        dev = np.max(np.abs(c - np.median(c)))
        if dev > tol.rel * max(1.0, float(np.max(ref))):
            return None
    return ChielliniCertificate(k=k, C1=float(c1[0]), C2=float(c2[0]),
                                residual=float(np.max(np.abs(dr - k * f))),
                                branch=branch_of(k), u_ref=u_ref, spread=spread)


def wave_speed_from_k(rho: float, D0: float, k: float, B0: float, sign: float = 1.0) -> float:
    """V_f = +-sqrt(rho D0 / k) - B0.

    Raises:
        DomainError: k = 0 or rho D0 / k <= 0.
    """
    if k == 0:
        raise DomainError("k must be nonzero")
    if rho * D0 / k <= 0:
        raise DomainError(f"rho*D0/k must be positive, got {rho * D0 / k}")
    return math.copysign(1.0, sign) * math.sqrt(rho * D0 / k) - B0


# --------------------------------------------------------------------------
# Chiellini parametric solution

_LINEAR_RATIO = (Family.LinearQ, Family.GeneralizedFisher, Family.PowerLawFisher)


def _linear_ratio_inverse(model: RCDModel, V_f: float):
    """For families with g/f = D0 rho u / (V_f + B0), invert explicitly."""
    p = model.params
    c = p["D0"] * p["rho"] / (V_f + p["B0"])
    if c == 0:
        return None

    def inv(target, hint=None):
        u = np.asarray(target, dtype=float) / c
        if not (np.all(np.isfinite(u))):
            raise InversionError("g/f target not finite")
        try:
            model.check(u)
        except DomainError as exc:
            raise InversionError(str(exc)) from None
        return u if u.ndim else float(u)

    return inv


def _bracket_inverse(abel: AbelForm, k: float, tol: Tolerance, u_start: float):
    """Invert g/f = target by outward bracketing from a hint, then Brent."""
    model = abel.model
    lo, hi = model.interval
    state = {"hint": float(u_start)}

    def ratio(u):
        return float(abel.ratio(u))

    def solve1(target, hint=None):
        if not math.isfinite(target):
            raise InversionError("g/f target not finite")
        a = state["hint"] if hint is None else float(hint)
        try:
            fa = ratio(a) - target
            slope = k * float(abel.f_fn(a))
        except AbelWaveError as exc:
            raise InversionError(f"cannot evaluate g/f at hint u={a}: {exc}") from None
        if fa == 0.0:
            return a
        up = (fa < 0) == (slope > 0)
        # d(g/f)/du = k f, so a Newton estimate sizes the first bracket step
        newton = abs(fa / slope) if slope != 0 else math.inf
        step = 1.25 * newton if math.isfinite(newton) and newton > 0 else 1e-3 * max(1.0, abs(a))
        step = max(step, 1e-14 * max(1.0, abs(a)))
        for _ in range(400):
            b = a + step if up else a - step
            at_edge = False
            if b >= hi:
                b, at_edge = hi, True
            elif b <= lo:
                b, at_edge = lo, True
            try:
                fb = ratio(b) - target
            except AbelWaveError:
                # edge of the evaluable region: creep towards it
                if abs(b - a) <= 1e-15 * max(1.0, abs(a)):
                    raise InversionError("g/f = target has no solution before the "
                                         "edge of the evaluable region") from None
                step = 0.5 * abs(b - a)
                continue
            if fb == 0.0:
                state["hint"] = b
                return b
            if (fa < 0) != (fb < 0):
                g = lambda u: ratio(u) - target
                root = find_root(g, min(a, b), max(a, b), tol)
                state["hint"] = root
                return root
            if at_edge:
                raise InversionError(f"g/f = {target:.6g} not attained inside [{lo}, {hi}]")
            a, fa = b, fb
            step *= 2.0
            if abs(a) > 1e300:
                break
        raise InversionError(f"no bracket for g/f = {target:.6g}")

    def inv(target, hint=None):
        t = np.asarray(target, dtype=float)
        if t.ndim == 0:
            return solve1(float(t), hint)
        return np.array([solve1(float(x), hint) for x in t])

    return inv, state


@dataclass
class _Theta1Curve:
    """Closures shared by the sampler and the returned solution."""

    abel: AbelForm
    k: float
    log_abs_C: float
    sign_ratio: float
    inv: object

    def target(self, theta):
        _, lf = log_exp_F(theta, self.k)
        with np.errstate(over="ignore"):
            return self.sign_ratio * np.exp(np.asarray(lf) - self.log_abs_C)

    def u_of(self, theta, hint=None):
        return self.inv(self.target(theta), hint)

    def dxi_dtheta(self, theta, u):
        return self.abel.model.D(u) / (self.abel.f_fn(u) * theta_quadratic(theta, self.k))

    def du_dtheta(self, theta, u):
        th = np.asarray(theta, dtype=float)
        f = self.abel.f_fn(u)
        return self.abel.g_fn(u) / (f * f * th * theta_quadratic(th, self.k))


def solve_theorem1(model: RCDModel, V_f: float, cert: ChielliniCertificate,
                   ic: tuple[float, float], theta_range: tuple[float, float] | None = None,
                   tol: Tolerance = DEFAULT_TOL, settings: MarchSettings | None = None,
                   fast_inverse: bool = True) -> ParametricSolution:
    """Sample the exact parametric travelling wave through ``ic`` = (u0, u0').

    theta0 follows from du/dxi = Q / (f theta) at the initial point and the
    constant C from g/f = C^-1 e^F there; xi(theta0) = 0. u(theta) is
    recovered by inverting g/f (explicitly when g/f is linear in u,
    otherwise by bracketing and Brent), and xi(theta) by adaptive quadrature
    of dxi/dtheta between consecutive nodes.

    Args:
        theta_range: closed theta window to cover. It must lie inside the
            component that holds theta0; the walk raises if the curve
            leaves the validity interval before reaching a finite end.
            Default: the whole component, walked until ``settings.xi_max``
            or until u leaves the validity interval.
        fast_inverse: allow the explicit inverse for linear g/f.

    Raises:
        DegenerateError: u0' = 0, f(u0) = 0, or Q(u0) = 0.
        DomainError: u0 outside the validity interval, or a ``theta_range``
            that crosses a singular point (the message names the component).
        InversionError: g/f not invertible on the requested ``theta_range``.
    """
    settings = settings or MarchSettings()
    abel = abel_reduce(model, V_f)
    k = cert.k
    u0, du0 = float(ic[0]), float(ic[1])
    model.check(u0)
    if du0 == 0.0:
        raise DegenerateError("u0' = 0 makes theta0 indeterminate")
    f0 = float(abel.f_fn(u0))
    if f0 == 0.0:
        raise DegenerateError("f = V_f + B vanishes at u0")
    Q0 = float(model.Q(u0))
    if Q0 == 0.0:
        raise DegenerateError("Q(u0) = 0: the initial point is a fixed point of the reaction")
    theta0 = Q0 / (f0 * du0)
    comp = theta_component(theta0, k)
    if theta_range is None:
        ends = comp
        strict = False
    else:
        a, b = sorted(float(x) for x in theta_range)
        if not (a <= theta0 <= b):
            raise ConfigError(f"theta_range [{a}, {b}] does not contain theta0={theta0}")
        if a <= comp[0] or b >= comp[1]:
            raise DomainError(f"theta_range [{a}, {b}] crosses a singular point; the "
                              f"solution through theta0={theta0} lives in {comp}")
        ends = (a, b)
        strict = True

    R0 = float(abel.ratio(u0))
    if R0 == 0.0:
        raise DegenerateError("g/f vanishes at u0")
    sF0, lF0 = log_exp_F(theta0, k)
    log_abs_C = lF0 - math.log(abs(R0))
    sign_C = sF0 * math.copysign(1.0, R0)

    inv = None
    if fast_inverse and model.family in _LINEAR_RATIO:
        inv = _linear_ratio_inverse(model, V_f)
    generic = inv is None
    if generic:
        inv, inv_state = _bracket_inverse(abel, k, tol, u0)
    curve = _Theta1Curve(abel, k, log_abs_C, math.copysign(1.0, R0), inv)

    def u_walk(th):
        return float(curve.u_of(th))

    def integrand(psi):
        return curve.dxi_dtheta(psi, curve.u_of(psi))

    left = march(theta0, 0.0, u0, ends[0], u_walk, integrand, settings, tol, strict,
                 vectorized=True)
    if generic:
        inv_state["hint"] = u0
    right = march(theta0, 0.0, u0, ends[1], u_walk, integrand, settings, tol, strict,
                  vectorized=True)
    t, xi, u = assemble(theta0, 0.0, u0, left, right)

    order = np.argsort(t)
    t_sorted, u_sorted = t[order], u[order]

    def hint_for(th):
        return float(np.interp(th, t_sorted, u_sorted))

    def u_of(th):
        return float(curve.u_of(th, hint_for(th)) if generic else curve.u_of(th))

    def dxi_dt(th):
        return float(curve.dxi_dtheta(th, u_of(th)))

    def du_dt(th):
        return float(curve.du_dtheta(th, u_of(th)))

    def xi_of(th):
        i = int(np.argmin(np.abs(t - th)))
        return float(xi[i] + quad(lambda p: dxi_dt(p), t[i], th, tol, vectorized=False))

    def d2u(th):
        # u' = Q / (f theta); differentiate in theta, then divide by dxi/dtheta
        uu = u_of(th)
        f = float(abel.f_fn(uu))
        Q = float(model.Q(uu))
        dqf = (float(model.dQ_fn(uu)) * f - Q * float(model.dB_fn(uu))) / (f * f)
        dslope = dqf * float(curve.du_dtheta(th, uu)) / th - Q / (f * th * th)
        return dslope / float(curve.dxi_dtheta(th, uu))

    def first_integral(th, slope):
        uu = u_of(th)
        return slope * float(abel.f_fn(uu)) * th / float(model.Q(uu))

    C = sign_C * math.exp(log_abs_C) if log_abs_C < 700 else sign_C * math.inf
    constants = {
        "k": k, "branch": cert.branch.value, "theta0": theta0, "xi0": 0.0,
        "C": C, "log_abs_C": log_abs_C, "sign_C": sign_C,
        "component": list(comp), "V_f": float(V_f),
        "u0": u0, "du0": du0, "stop": [left.stop, right.stop],
        "params": dict(model.params),
    }
    return ParametricSolution(Route.Chiellini, "theta", t, xi, u, constants, model, float(V_f),
                              u_of, dxi_dt, du_dt, ic=(u0, du0), xi_of=xi_of,
                              first_integral=first_integral, d2u=d2u)


# --------------------------------------------------------------------------
# constant coefficients: closed form


@dataclass(frozen=True)
class LinearModelConstants:
    """Constants of the closed-form wave for D = D0, B = B0, Q = rho u.

    ``Delta2`` = (V_f + B0)^2 - 4 D0 rho carries the sign that decides
    between the hyperbolic and trigonometric forms.
    """

    Delta2: float
    C: float
    xi0: float

    @property
    def Delta(self) -> float:
        return math.sqrt(abs(self.Delta2))


def _linear_params(params: Mapping[str, float], V_f: float):
    try:
        D0, B0, rho = float(params["D0"]), float(params["B0"]), float(params["rho"])
    except KeyError as exc:
        raise ConfigError(f"linear model needs D0, B0, rho; missing {exc}") from None
    F = V_f + B0
    if F == 0:
        raise DegenerateError("V_f + B0 = 0")
    return D0, rho, F


def _is_quarter(D0, rho, F):
    return abs(rho * D0 / F ** 2 - 0.25) <= QUARTER_TOL


def linear_closed_form(params: Mapping[str, float], V_f: float, C: float, xi0: float, xi):
    """u(xi) for the constant-coefficient model.

    With F = V_f + B0, s = (xi - xi0) / (2 D0) and Delta^2 = F^2 - 4 D0 rho:
    u = F^2/(C D0 rho) e^{-F s} [cosh(Delta s) + (Delta/F) sinh(Delta s)],
    written with cos and sin of |Delta| s when Delta^2 < 0, and
    u = F^2/(4 C D0^2 rho) (xi - xi0 + 2 D0/F) e^{-F s} when rho D0 / F^2 = 1/4.
    """
    D0, rho, F = _linear_params(params, V_f)
    x = np.asarray(xi, dtype=float) - xi0
    s = x / (2.0 * D0)
    if _is_quarter(D0, rho, F):
        out = F * F / (4.0 * C * D0 * D0 * rho) * (x + 2.0 * D0 / F) * np.exp(-F * s)
    else:
        d2 = F * F - 4.0 * D0 * rho
        d = math.sqrt(abs(d2))
        if d2 > 0:
            bracket = np.cosh(d * s) + (d / F) * np.sinh(d * s)
        else:
            bracket = np.cos(d * s) - (d / F) * np.sin(d * s)
        out = F * F / (C * D0 * rho) * np.exp(-F * s) * bracket
    return out if np.ndim(out) else float(out)


def fit_linear_constants(params: Mapping[str, float], V_f: float,
                         ic: tuple[float, float]) -> LinearModelConstants:
    """C and xi0 of the closed form matching u(0) = u0, u'(0) = u0'.

    Raises:
        DomainError: the initial data lie outside the family the closed
            form covers (for Delta^2 > 0 this needs |(2 D0 u0'/u0 + F)/Delta| < 1).
    """
    D0, rho, F = _linear_params(params, V_f)
    u0, du0 = float(ic[0]), float(ic[1])
    if u0 == 0:
        raise DegenerateError("u0 = 0 fixes no amplitude")
    p = du0 / u0
    d2 = F * F - 4.0 * D0 * rho
    if _is_quarter(D0, rho, F):
        a = p + F / (2.0 * D0)
        if a == 0:
            raise DomainError("initial data sit on the pure exponential; no finite xi0")
        xi0 = 2.0 * D0 / F - 1.0 / a
        C = F * F / (4.0 * D0 * D0 * rho * u0) * (-xi0 + 2.0 * D0 / F) * math.exp(F * xi0 / (2.0 * D0))
        return LinearModelConstants(d2, C, xi0)
    d = math.sqrt(abs(d2))
    q = (2.0 * D0 * p + F) / d
    if d2 > 0:
        if abs(d / F) >= 1 or abs(q) >= 1:
            raise DomainError(f"initial data outside the hyperbolic family (|q|={abs(q):.6g} >= 1)")
        s0 = (math.atanh(q) - math.atanh(d / F)) / d
    else:
        s0 = (math.atan(-q) - math.atan(d / F)) / d
    xi0 = -2.0 * D0 * s0
    unit = linear_closed_form({"D0": D0, "B0": F - V_f, "rho": rho}, V_f, 1.0, xi0, 0.0)
    if unit == 0:
        raise DomainError("initial point is a zero of the closed form")
    return LinearModelConstants(d2, unit / u0, xi0)


# --------------------------------------------------------------------------
# dimensionless power-law Fisher model


def fisher_xi_closed_form(alpha: float, theta, theta0: float, C0: float, V: float):
    """xi(theta) - xi(theta0) at k = 1/4 in closed form for alpha = -1 or -2."""

    def prim(th):
        th = np.asarray(th, dtype=float)
        q = 2.0 * th + 1.0
        e1 = np.exp(1.0 / q)
        if alpha == -1:
            return (4.0 / (V + 1.0)) * (e1 * (4.0 * th + 1.0) - 2.0 * C0) / (4.0 * C0 * q)
        if alpha == -2:
            num = (16.0 * C0 ** 2 * q - 16.0 * C0 * e1 * (8.0 * th ** 2 + 6.0 * th + 1.0)
                   + e1 ** 2 * (4.0 * th * (5.0 * th + 2.0) + 1.0))
            return -(4.0 / (V + 1.0)) * num / (32.0 * C0 ** 2 * q ** 2)
        raise DomainError(f"no closed form for alpha={alpha}")

    return prim(theta) - prim(theta0)


def fisher_powerlaw_model(alpha: float, k: float, V: float) -> RCDModel:
    """Dimensionless model D = (1-U)^-alpha, B = 1, Q = lambda U (1-U)^alpha, lambda = k (V+1)^2."""
    lam = k * (V + 1.0) ** 2
    return make_model(Family.PowerLawFisher,
                      {"D0": 1.0, "B0": 1.0, "rho": lam, "u_max": 1.0, "alpha": alpha})


def fisher_powerlaw_solution(alpha: float, k: float, V: float, ic: tuple[float, float],
                             theta_range: tuple[float, float] | None = None,
                             tol: Tolerance = DEFAULT_TOL,
                             settings: MarchSettings | None = None) -> ParametricSolution:
    """Exact wave of the dimensionless power-law Fisher model through (U0, U0').

    U(theta) = C0^-1 e^{F(theta, k)} with C0 = e^{F(theta0, k)} / U0 and
    theta0 = k (V+1) U0 (1-U0)^alpha / U0'. At k = 1/4 with alpha = -1 or -2
    the sampled xi values are cross-checked against the closed-form
    primitives; the largest deviation is stored as ``closed_form_dev``.

    Raises:
        DegenerateError: U0' = 0.
        DomainError: U0 outside (0, 1), or U reaching 1 inside ``theta_range``.
    """
    U0, dU0 = float(ic[0]), float(ic[1])
    if not 0.0 < U0 < 1.0:
        raise DomainError(f"U0 must lie in (0, 1), got {U0}")
    if dU0 == 0.0:
        raise DegenerateError("U0' = 0 makes theta0 = 0/0; perturb the initial data")
    if V + 1.0 == 0.0:
        raise DegenerateError("V + 1 = 0")
    model = fisher_powerlaw_model(alpha, k, V)
    try:
        sol = solve_theorem1(model, V, certificate_for(k), (U0, dU0), theta_range, tol, settings)
    except InversionError as exc:
        raise DomainError(f"U leaves (0, 1) inside the requested theta range: {exc}") from None
    theta0 = k * (V + 1.0) * U0 * (1.0 - U0) ** alpha / dU0
    s0, l0 = log_exp_F(theta0, k)
    c = sol.constants
    c.update({"alpha": alpha, "V": V, "lambda": k * (V + 1.0) ** 2,
              "theta0_formula": theta0,
              "C0": s0 * math.exp(l0) / U0 if l0 < 700 else s0 * math.inf,
              "log_abs_C0": l0 - math.log(U0)})
    if branch_of(k) is Branch.KeqQuarter and alpha in (-1.0, -2.0):
        cf = fisher_xi_closed_form(alpha, sol.t, c["theta0"], c["C0"], V)
        c["closed_form_dev"] = float(np.max(np.abs(cf - sol.xi)))
    return sol


def fisher_small_theta_slope(C0: float, V: float) -> float:
    """dU/dxi ~ (V+1) C0^-1 e / 4 for small theta at k = 1/4."""
    return (V + 1.0) * math.e / (4.0 * C0)


# --------------------------------------------------------------------------
# Convection family


@dataclass(frozen=True)
class ConvectionFamily:
    """B(u) = +-B0 u / sqrt(1 + k B0^2 u^2 / (rho D0)) - V_f with Fisher-type D and Q.

    ``u_of_theta`` and ``xi_of_theta`` evaluate the explicit parametric pair
    in terms of the constant C of g/f = C^-1 e^F; ``solve`` runs the generic
    Chiellini sampler on ``model`` and cross-checks it against that pair.
    """

    model: RCDModel
    k: float
    V_f: float
    B0: float
    rho: float
    D0: float
    sign: float
    alpha: float
    u_max: float

    def B(self, u):
        return self.model.B(u)

    @property
    def _c(self):
        return self.k * self.B0 ** 2 / (self.rho * self.D0)

    def radicand(self, theta, C: float):
        e2F = exp_F(theta, self.k) ** 2
        return (self.B0 / (C * self.D0 * self.rho)) ** 2 * e2F - 1.0

    def u_of_theta(self, theta, C: float, branch: float = 1.0):
        """u = +-sqrt(rho D0/(k B0^2)) sqrt((B0/(C D0 rho))^2 e^{2F} - 1)."""
        rad = np.asarray(self.radicand(theta, C), dtype=float)
        if np.any(rad < 0):
            thr = abs(C * self.D0 * self.rho / self.B0)
            raise DomainError(f"negative radicand: the admissible theta-window is where "
                              f"|e^F(theta)| >= {thr:.6g} inside the component of theta")
        out = math.copysign(1.0, branch) * np.sqrt(rad / self._c)
        return out if out.ndim else float(out)

    def xi_of_theta(self, theta: float, theta0: float, C: float, branch: float = 1.0,
                    tol: Tolerance = DEFAULT_TOL) -> float:
        """xi(theta) - xi(theta0) from the explicit integrand."""
        pref = math.sqrt(self.k * self.D0 / self.rho)
        orient = math.copysign(1.0, self.sign) * math.copysign(1.0, self.B0) * math.copysign(1.0, branch)
        scale = math.sqrt(self.rho * self.D0 / (self.k * self.B0 ** 2 * self.u_max ** 2))

        def integrand(psi):
            rad = self.radicand(psi, C)
            e2F = exp_F(psi, self.k) ** 2
            num = (1.0 - math.copysign(1.0, branch) * scale * np.sqrt(rad)) ** (-self.alpha)
            den = np.sqrt(1.0 - (C * self.D0 * self.rho / self.B0) ** 2 / e2F)
            return orient * pref * num / (den * theta_quadratic(psi, self.k))

        return quad(integrand, theta0, theta, tol)

    def solve(self, ic: tuple[float, float], theta_range=None, tol: Tolerance = DEFAULT_TOL,
              settings: MarchSettings | None = None) -> ParametricSolution:
        sol = solve_theorem1(self.model, self.V_f, certificate_for(self.k), ic, theta_range,
                             tol, settings)
        C = sol.constants["C"]
        br = math.copysign(1.0, ic[0])
        explicit = self.u_of_theta(sol.t, C, br)
        sol.constants["explicit_u_dev"] = float(np.max(np.abs(explicit - sol.u)))
        return sol


def convection_family(B0: float, k: float, rho: float, D0: float, V_f: float, sign: float = 1.0,
                      u_max: float = 1.0, alpha: float = 1.0, u_lo: float = 0.0,
                      u_hi: float | None = None) -> ConvectionFamily:
    """Model with the convection term that makes Fisher-type D, Q integrable for given k.

    Raises:
        DomainError: k B0 = 0 or k rho D0 <= 0.
    """
    params = {"D0": D0, "B0": B0, "rho": rho, "u_max": u_max, "alpha": alpha,
              "k": k, "V_f": V_f, "sign": sign, "u_lo": u_lo}
    if u_hi is not None:
        params["u_hi"] = u_hi
    model = make_model(Family.ConvectionFamily, params)
    return ConvectionFamily(model, float(k), float(V_f), float(B0), float(rho), float(D0),
                            math.copysign(1.0, sign), float(alpha), float(u_max))
