"""Reaction-convection-diffusion model families and their travelling-wave reductions.

A model is the triple (D, B, Q) of the PDE

    u_t = (D(u) u_x)_x + B(u) u_x + Q(u)

stored as closures over a parameter map. Substituting u(x - V_f t) gives

    u'' + alpha(u) u'^2 + beta(u) u' + gamma(u) = 0,
    alpha = d ln D / du,  beta = (V_f + B) / D,  gamma = Q / D,

and ``abel_reduce`` produces the coefficients f = V_f + B, g = D Q of the
first-kind Abel equation dw/du = f w^2 + g w^3 with w = 1 / (D u').
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, DegenerateError, DomainError
from .numerics import derivative

EPS_DOM = 1e-9


class Family(str, enum.Enum):
    LinearQ = "LinearQ"
    GeneralizedFisher = "GeneralizedFisher"
    PowerLawFisher = "PowerLawFisher"
    ConvectionFamily = "ConvectionFamily"
    ConstantDQ = "ConstantDQ"
    LinearDQ = "LinearDQ"
    InverseDQ = "InverseDQ"
    PowerLawDQ = "PowerLawDQ"
    PowerLawReaction = "PowerLawReaction"
    Custom = "Custom"


LEMKE_FAMILIES = frozenset({Family.ConstantDQ, Family.LinearDQ, Family.InverseDQ,
                            Family.PowerLawDQ, Family.PowerLawReaction})

# name -> default (None means required)
_PARAMS: dict[Family, dict[str, float | None]] = {
    Family.LinearQ: {"D0": None, "B0": None, "rho": None},
    Family.GeneralizedFisher: {"D0": None, "B0": None, "rho": None, "u_max": None, "alpha": 1.0},
    Family.PowerLawFisher: {"D0": None, "B0": None, "rho": None, "u_max": 1.0, "alpha": None},
    Family.ConvectionFamily: {"D0": None, "B0": None, "rho": None, "u_max": 1.0, "alpha": None,
                              "k": None, "V_f": None, "sign": 1.0, "u_lo": 0.0, "u_hi": math.inf},
    Family.ConstantDQ: {"D0": None, "B0": None, "alpha": None, "kappa": 0.0},
    Family.LinearDQ: {"D0": None, "B0": None, "alpha": None, "beta": None, "V_f": None,
                      "kappa": 0.0},
    Family.InverseDQ: {"D0": None, "B0": None, "K": None, "kappa": 0.0},
    Family.PowerLawDQ: {"D0": None, "B0": None, "m": None, "b": None, "sign": 1.0,
                        "V_f": None, "kappa": 0.0},
    Family.PowerLawReaction: {"D0": None, "B0": None, "m": None, "A": None, "lambda": None},
}


def powerlaw_dq_coefficient(m: float) -> float:
    """Linear coefficient 2(m+1)/(m+3)^2 shared by the power-law DQ models."""
    return 2.0 * (m + 1.0) / (m + 3.0) ** 2


def powerlaw_dq_A(m: float, b: float, sign: float) -> float:
    """A = +-(m+1)(m-1)^2 b^(1-m) / (2 (m+3)^2)."""
    return math.copysign(1.0, sign) * (m + 1.0) * (m - 1.0) ** 2 / (2.0 * (m + 3.0) ** 2) * b ** (1.0 - m)


@dataclass(frozen=True)
class Scaling:
    """Dimensionless variables U = s_u u, X = s_x x, T = s_t t.

    Under this change D, B, Q map to
    D~(U) = D(U/s_u) s_x^2/s_t, B~ = B s_x/s_t, Q~ = Q s_u/s_t.
    """

    s_t: float
    s_x: float
    s_u: float

    def unscale(self, dimless: "RCDModel"):
        """Closures (D, B, Q) of the dimensional model recovered from ``dimless``."""
        s_t, s_x, s_u = self.s_t, self.s_x, self.s_u
        return (
            lambda u: dimless.D(s_u * np.asarray(u)) * s_t / s_x ** 2,
            lambda u: dimless.B(s_u * np.asarray(u)) * s_t / s_x,
            lambda u: dimless.Q(s_u * np.asarray(u)) * s_t / s_u,
        )


@dataclass(frozen=True)
class RCDModel:
    """One PDE instance. Closures accept scalars or numpy arrays.

    ``interval`` is the closed validity interval for u; evaluating D, B, Q,
    or the coefficients outside it raises DomainError.
    """

    family: Family
    params: Mapping[str, float]
    D: Callable
    B: Callable
    Q: Callable
    interval: tuple[float, float] = (-math.inf, math.inf)
    dlnD: Callable | None = None
    gamma: Callable | None = None
    scaling: Scaling | None = None
    name: str = ""
    dQ: Callable | None = None
    dB: Callable | None = None
    shifted_B: Callable | None = None

    def check(self, u):
        lo, hi = self.interval
        if isinstance(u, float) and lo <= u <= hi:
            return u
        ua = np.asarray(u, dtype=float)
        if np.any(ua < lo) or np.any(ua > hi) or np.any(np.isnan(ua)):
            bad = ua[(ua < lo) | (ua > hi) | np.isnan(ua)] if ua.ndim else ua
            raise DomainError(f"{self.family.value}: u={np.ravel(bad)[:3]} outside "
                              f"validity interval [{lo}, {hi}]")
        return ua

    def contains(self, u) -> bool:
        lo, hi = self.interval
        return bool(lo <= u <= hi)

    def gamma_fn(self, u):
        """Q/D; uses a closed form when the family provides one (finite at D poles)."""
        if self.gamma is not None:
            return self.gamma(u)
        return self.Q(u) / self.D(u)

    def dlnD_fn(self, u):
        if self.dlnD is not None:
            return self.dlnD(u)
        return _fd(self, lambda s: math.log(float(self.D(s))), u)

    def dQ_fn(self, u):
        if self.dQ is not None:
            return self.dQ(u)
        return _fd(self, lambda s: float(self.Q(s)), u)

    def dB_fn(self, u):
        if self.dB is not None:
            return self.dB(u)
        return _fd(self, lambda s: float(self.B(s)), u)

    def f_fn(self, V_f: float, u):
        """V_f + B(u), through ``shifted_B`` when the family folds a speed into B."""
        if self.shifted_B is not None:
            return self.shifted_B(V_f, u)
        return V_f + self.B(u)

    def is_constant_B(self, probes: int = 9) -> bool:
        grid = probe_grid(self, probes)
        b = self.B(grid)
        return bool(np.all(np.abs(b - b[0]) <= 1e-14 * max(1.0, abs(b[0]))))


def _fd(model, fn, u):
    """Extrapolated central difference of ``fn`` kept inside the validity interval."""
    ua = np.atleast_1d(np.asarray(u, dtype=float))
    out = np.empty_like(ua)
    lo, hi = model.interval
    for i, x in enumerate(ua):
        h = 1e-3 * max(1.0, abs(x))
        room = min(x - lo, hi - x)
        if room < 2 * h:
            h = 0.5 * room
        out[i] = derivative(fn, x, h)
    return out if np.ndim(u) else float(out[0])


def probe_grid(model: RCDModel, n: int = 16, lo: float | None = None,
               hi: float | None = None) -> np.ndarray:
    """Chebyshev points strictly inside the validity interval (infinite ends clipped to +-10)."""
    a, b = model.interval
    a = a if lo is None else lo
    b = b if hi is None else hi
    a = max(a, -10.0) if math.isinf(a) else a
    b = min(b, 10.0) if math.isinf(b) else b
    k = np.arange(n)
    x = np.cos((2 * k + 1) * np.pi / (2 * n))[::-1]
    margin = 0.02 * (b - a)
    return (a + margin) + (b - a - 2 * margin) * (x + 1) / 2


def _require(family: Family, params: Mapping[str, float]) -> dict[str, float]:
    spec = _PARAMS[family]
    unknown = set(params) - set(spec)
    if unknown:
        raise ConfigError(f"{family.value}: unknown parameter(s) {sorted(unknown)}")
    out = {}
    for name, default in spec.items():
        if name in params:
            try:
                out[name] = float(params[name])
            except (TypeError, ValueError):
                raise ConfigError(f"{family.value}: parameter {name!r} must be a real number")
        elif default is None:
            raise ConfigError(f"{family.value}: missing required parameter {name!r}")
        else:
            out[name] = default
    if "D0" in out and not out["D0"] > 0:
        raise DomainError(f"{family.value}: D0 must be > 0, got {out['D0']}")
    if "u_max" in out and not out["u_max"] > 0:
        raise DomainError(f"{family.value}: u_max must be > 0, got {out['u_max']}")
    return out


def _fisher_closures(p, model_ref):
    D0, rho, umax, a = p["D0"], p["rho"], p["u_max"], p["alpha"]
    lo, hi = 0.0, umax * (1.0 - EPS_DOM)
    if a == 0:
        # every (1 - u/u_max) factor is raised to the power 0: nothing is singular
        hi = math.inf

    def one_minus(u):
        ua = model_ref[0].check(u)
        return 1.0 - ua / umax

    def D(u):
        return D0 * one_minus(u) ** (-a)

    def Q(u):
        ua = np.asarray(u, dtype=float)
        return rho * ua * one_minus(u) ** a

    def gamma(u):
        ua = np.asarray(u, dtype=float)
        if np.any(ua < lo) or np.any(ua > max(umax, hi)):
            raise DomainError(f"gamma: u outside [0, {max(umax, hi)}]")
        return rho * ua * (1.0 - ua / umax) ** (2 * a) / D0

    def dlnD(u):
        return a / (umax * one_minus(u))

    def dQ(u):
        om = one_minus(u)
        return rho * om ** a - rho * a * np.asarray(u, dtype=float) / umax * om ** (a - 1.0)

    return D, Q, gamma, dlnD, dQ, (lo, hi)


def make_model(family, params: Mapping[str, float] | None = None) -> RCDModel:
    """Build a model of the named family.

    Raises:
        ConfigError: unknown family, missing or unknown parameter.
        DomainError: non-positive ``D0`` or ``u_max``, or family-specific
            parameter restrictions.
    """
    try:
        family = Family(family)
    except ValueError:
        raise ConfigError(f"unknown model family {family!r}")
    if family is Family.Custom:
        raise ConfigError("Custom models are built with make_custom_model(D, B, Q, interval)")
    p = _require(family, params or {})
    ref: list[RCDModel] = []  # late binding so closures can call model.check
    gamma = dlnD = dQ = shifted_B = None
    dB = lambda u: 0.0 * np.asarray(u, dtype=float)
    interval = (-math.inf, math.inf)

    if family is Family.LinearQ:
        D0, B0, rho = p["D0"], p["B0"], p["rho"]
        D = lambda u: D0 + 0.0 * np.asarray(u, dtype=float)
        B = lambda u: B0 + 0.0 * np.asarray(u, dtype=float)
        Q = lambda u: rho * np.asarray(u, dtype=float)
        dlnD = lambda u: 0.0 * np.asarray(u, dtype=float)
        dQ = lambda u: rho + 0.0 * np.asarray(u, dtype=float)

    elif family in (Family.GeneralizedFisher, Family.PowerLawFisher):
        B0 = p["B0"]
        D, Q, gamma, dlnD, dQ, interval = _fisher_closures(p, ref)
        B = lambda u: B0 + 0.0 * np.asarray(u, dtype=float)

    elif family is Family.ConvectionFamily:
        if p["k"] == 0 or p["B0"] == 0:
            raise DomainError("ConvectionFamily: k and B0 must be nonzero")
        if p["rho"] * p["D0"] / p["k"] <= 0:
            raise DomainError("ConvectionFamily: need k*rho*D0 > 0")
        D, Q, gamma, dlnD, dQ, (lo, hi) = _fisher_closures(p, ref)
        u_lo = p["u_lo"]
        u_hi = min(p["u_hi"], hi)
        if not u_lo < u_hi:
            raise DomainError(f"ConvectionFamily: empty validity interval [{u_lo}, {u_hi}]")
        interval = (u_lo, u_hi)
        s = math.copysign(1.0, p["sign"])
        B0, Vf = p["B0"], p["V_f"]
        c = p["k"] * B0 ** 2 / (p["rho"] * p["D0"])

        def B(u):
            ua = np.asarray(u, dtype=float)
            return s * B0 * ua / np.sqrt(1.0 + c * ua * ua) - Vf

        def dB(u):
            ua = np.asarray(u, dtype=float)
            return s * B0 / (1.0 + c * ua * ua) ** 1.5

        def shifted_B(V, u):
            # V + B(u) without the cancellation of adding V back onto -V_f
            ua = np.asarray(ref[0].check(u), dtype=float)
            return s * B0 * ua / np.sqrt(1.0 + c * ua * ua) + (V - Vf)

    elif family in (Family.ConstantDQ, Family.LinearDQ, Family.InverseDQ, Family.PowerLawDQ):
        D0, B0, kap = p["D0"], p["B0"], p["kappa"]
        if family is Family.ConstantDQ:
            al = p["alpha"]
            DQ = lambda u: al + 0.0 * np.asarray(u, dtype=float)
        elif family is Family.LinearDQ:
            al, be, f = p["alpha"], p["beta"], p["V_f"] + B0
            DQ = lambda u: be * f * np.asarray(u, dtype=float) + al
        elif family is Family.InverseDQ:
            if p["K"] == 0:
                raise DomainError("InverseDQ: K must be nonzero")
            K = p["K"]
            interval = (1e-300, math.inf)
            DQ = lambda u: K / np.asarray(u, dtype=float)
        else:
            m = p["m"]
            if m in (-3.0, -1.0, 1.0):
                raise DomainError(f"PowerLawDQ: m={m} is excluded (m != -3, -1, 1)")
            if p["b"] <= 0:
                raise DomainError("PowerLawDQ: b must be > 0")
            f = p["V_f"] + B0
            if f == 0:
                raise DegenerateError("PowerLawDQ: V_f + B0 = 0")
            A = powerlaw_dq_A(m, p["b"], p["sign"])
            cm = powerlaw_dq_coefficient(m)
            if not float(m).is_integer():
                interval = (0.0, math.inf)
            DQ = lambda u: f * (cm * f * np.asarray(u, dtype=float)
                                - A * (f * np.asarray(u, dtype=float)) ** m)

        def D(u):
            ua = ref[0].check(u)
            return D0 * np.exp(kap * ua)

        def Q(u):
            return DQ(ref[0].check(u)) / D(u)

        B = lambda u: B0 + 0.0 * np.asarray(u, dtype=float)
        dlnD = lambda u: kap + 0.0 * np.asarray(u, dtype=float)

    elif family is Family.PowerLawReaction:
        D0, B0, m, A, lam = p["D0"], p["B0"], p["m"], p["A"], p["lambda"]
        if m in (-3.0, -1.0):
            raise DomainError(f"PowerLawReaction: m={m} is excluded (m != -3, -1)")
        lin = powerlaw_dq_coefficient(m) * B0 ** 2 / D0 * lam
        if not float(m).is_integer():
            interval = (0.0, math.inf)
        D = lambda u: D0 + 0.0 * np.asarray(u, dtype=float)
        B = lambda u: B0 + 0.0 * np.asarray(u, dtype=float)

        def Q(u):
            ua = ref[0].check(u)
            return lin * ua - A * ua ** m

        dlnD = lambda u: 0.0 * np.asarray(u, dtype=float)

    if family in (Family.LinearDQ, Family.InverseDQ, Family.PowerLawDQ, Family.ConstantDQ,
                  Family.PowerLawReaction):
        dQ = None
    model = RCDModel(family, MappingProxyType(dict(p)), D, B, Q, interval, dlnD, gamma,
                     name=family.value, dQ=dQ, dB=dB,
                     shifted_B=shifted_B)
    ref.append(model)
    return model


def make_custom_model(D: Callable, B: Callable, Q: Callable,
                      interval: tuple[float, float] = (-math.inf, math.inf),
                      params: Mapping[str, float] | None = None, name: str = "Custom") -> RCDModel:
    """Wrap user closures. No closed-form guarantees; only numeric probing applies."""
    ref: list[RCDModel] = []

    def wrap(fn):
        return lambda u: fn(ref[0].check(u))

    model = RCDModel(Family.Custom, MappingProxyType(dict(params or {})), wrap(D), wrap(B),
                     wrap(Q), tuple(interval), name=name)
    ref.append(model)
    return model


def model_from_dict(doc: Mapping) -> tuple[RCDModel, float | None]:
    """Parse ``{"family": ..., "params": {...}, "V_f": ...}``; unknown keys are rejected."""
    allowed = {"family", "params", "V_f"}
    unknown = set(doc) - allowed
    if unknown:
        raise ConfigError(f"model document: unknown key(s) {sorted(unknown)}")
    if "family" not in doc:
        raise ConfigError("model document: missing 'family'")
    model = make_model(doc["family"], doc.get("params", {}))
    vf = doc.get("V_f")
    return model, (None if vf is None else float(vf))


@dataclass(frozen=True)
class TWCoefficients:
    """alpha = d ln D/du, beta = (V_f + B)/D, gamma = Q/D of the travelling-wave ODE."""

    alpha_fn: Callable
    beta_fn: Callable
    gamma_fn: Callable
    V_f: float

    def residual(self, u, du, d2u):
        """u'' + alpha u'^2 + beta u' + gamma."""
        return d2u + self.alpha_fn(u) * du * du + self.beta_fn(u) * du + self.gamma_fn(u)


def travelling_wave_coefficients(model: RCDModel, V_f: float) -> TWCoefficients:
    if V_f < 0:
        raise DomainError(f"wave speed V_f must be >= 0, got {V_f}")
    V_f = float(V_f)
    return TWCoefficients(
        alpha_fn=model.dlnD_fn,
        beta_fn=lambda u: model.f_fn(V_f, u) / model.D(u),
        gamma_fn=model.gamma_fn,
        V_f=V_f,
    )


@dataclass(frozen=True)
class AbelForm:
    """dw/du = f w^2 + g w^3 with f = V_f + B, g = D Q.

    ``chain`` documents the substitutions leading here; ``w0`` gives the
    initial value w(u0) = 1/(D(u0) u0').
    """

    model: RCDModel
    V_f: float
    f_fn: Callable
    g_fn: Callable
    chain: Mapping[str, str] = field(default_factory=dict)

    def w0(self, u0: float, du0: float) -> float:
        if du0 == 0:
            raise DegenerateError("w(u0) undefined for u0' = 0")
        return 1.0 / (float(self.model.D(u0)) * du0)

    def ratio(self, u):
        """g/f, the quantity the Chiellini condition differentiates."""
        f = self.f_fn(u)
        if np.any(f == 0):
            raise DegenerateError("f = V_f + B vanishes")
        return self.g_fn(u) / f


_CHAIN = MappingProxyType({
    "sigma": "du/dxi",
    "v": "1/sigma",
    "w": "v/D(u)",
    "theta": "g(u) w / f(u)",
    "w(u0)": "1/(D(u0) u0')",
})


def abel_reduce(model: RCDModel, V_f: float) -> AbelForm:
    if V_f < 0:
        raise DomainError(f"wave speed V_f must be >= 0, got {V_f}")
    V_f = float(V_f)
    return AbelForm(
        model=model,
        V_f=V_f,
        f_fn=lambda u: model.f_fn(V_f, u),
        g_fn=lambda u: model.D(u) * model.Q(u),
        chain=_CHAIN,
    )


def nondimensionalize(model: RCDModel) -> RCDModel:
    """Scale a power-law model to its dimensionless form.

    Fisher-type families map to D = (1-U)^-alpha, B = 1, Q = lambda U (1-U)^alpha
    with lambda = rho D0 / B0^2. PowerLawReaction maps to
    D = 1, B = 1, Q = 2(m+1)/(m+3)^2 lambda U - U^m. The returned model
    carries the ``Scaling`` used.

    Raises:
        DomainError: B0 = 0 (scaling undefined) or A <= 0 for PowerLawReaction.
        ConfigError: family without a dimensionless form.
    """
    p = model.params
    if model.family in (Family.PowerLawFisher, Family.GeneralizedFisher):
        if p["B0"] == 0:
            raise DomainError("nondimensionalize: B0 = 0 leaves the scaling undefined")
        D0, B0 = p["D0"], p["B0"]
        scaling = Scaling(s_t=B0 ** 2 / D0, s_x=B0 / D0, s_u=1.0 / p["u_max"])
        lam = p["rho"] * D0 / B0 ** 2
        dimless = make_model(Family.PowerLawFisher,
                             {"D0": 1.0, "B0": 1.0, "rho": lam, "u_max": 1.0, "alpha": p["alpha"]})
    elif model.family is Family.PowerLawReaction:
        if p["B0"] == 0:
            raise DomainError("nondimensionalize: B0 = 0 leaves the scaling undefined")
        D0, B0, A, m = p["D0"], p["B0"], p["A"], p["m"]
        if m == 1.0:
            raise DomainError("nondimensionalize: m = 1 has no amplitude scaling")
        if A <= 0:
            raise DomainError("nondimensionalize: amplitude scaling needs A > 0")
        s_u = (B0 ** 2 / (A * D0)) ** (-1.0 / (m - 1.0))
        scaling = Scaling(s_t=B0 ** 2 / D0, s_x=B0 / D0, s_u=s_u)
        dimless = make_model(Family.PowerLawReaction,
                             {"D0": 1.0, "B0": 1.0, "m": m, "A": 1.0, "lambda": p["lambda"]})
    else:
        raise ConfigError(f"nondimensionalize: no dimensionless form for {model.family.value}")
    return RCDModel(dimless.family, dimless.params, dimless.D, dimless.B, dimless.Q,
                    dimless.interval, dimless.dlnD, dimless.gamma, scaling,
                    name=f"{dimless.family.value}(dimensionless)", dQ=dimless.dQ, dB=dimless.dB)
