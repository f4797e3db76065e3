"""Independent checks: ODE shooting, PDE evolution, residual meters, front speed.

Nothing here uses the parametric constructions; every oracle starts from the
model's D, B, Q alone.
"""

from __future__ import annotations

import enum
import json
import math
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import (AbelWaveError, ConfigError, DomainError, InstabilityError,
                     IntegrationError, TrackingError)
from .model import RCDModel, travelling_wave_coefficients
from .numerics import Tolerance, find_root, integrate_ode
from .solution import ParametricSolution, Route, Source, WaveProfile

SHOOT_TOL = Tolerance(rel=1e-10, abs=1e-12, max_iter=2000)


# --------------------------------------------------------------------------
# ODE shooting


def shoot_wave_ode(model: RCDModel, V_f: float, ic: tuple[float, float],
                   xi_span: tuple[float, float], tol: Tolerance = SHOOT_TOL, n: int = 513,
                   xi0: float = 0.0) -> WaveProfile:
    """Integrate u'' + alpha u'^2 + beta u' + gamma = 0 from (u0, u0') at ``xi0``.

    The trajectory is integrated both ways from ``xi0`` when ``xi_span``
    straddles it, and resampled on a uniform grid of ``n`` points. If u
    leaves the validity interval the profile is cut at the last point
    reached and ``metadata["truncated"]`` is set.

    Raises:
        DomainError: u0 outside the validity interval or ``xi0`` outside ``xi_span``.
    """
    a, b = sorted(float(x) for x in xi_span)
    if not a <= xi0 <= b:
        raise DomainError(f"xi0={xi0} outside xi_span [{a}, {b}]")
    model.check(float(ic[0]))
    tw = travelling_wave_coefficients(model, V_f)

    def rhs(_, y):
        u, s = y
        try:
            acc = -(tw.alpha_fn(u) * s * s + tw.beta_fn(u) * s + tw.gamma_fn(u))
        except DomainError:
            return np.array([math.nan, math.nan])
        return np.array([s, float(acc)])

    y0 = np.array([float(ic[0]), float(ic[1])])
    pieces = []
    reached = [xi0, xi0]
    truncated = False
    for side, end in ((0, a), (1, b)):
        if end == xi0:
            continue
        try:
            traj = integrate_ode(rhs, y0, xi0, end, tol)
        except IntegrationError as exc:
            traj = exc.trajectory
            truncated = True
        if traj is None or len(traj.Q) == 0:
            continue
        reached[side] = traj.t_end
        pieces.append(traj)
    lo, hi = reached
    if hi - lo <= 0:
        raise DomainError("the trajectory could not leave the initial point")
    grid = np.linspace(lo, hi, n)
    u = np.empty(n)
    for traj in pieces:
        t0, t1 = sorted((traj.t[0], traj.t_end))
        mask = (grid >= t0 - 1e-15) & (grid <= t1 + 1e-15)
        if np.any(mask):
            u[mask] = traj(np.clip(grid[mask], t0, t1))[:, 0]
    meta = {"V_f": float(V_f), "model": model.name, "source": Source.Shooter.value,
            "truncated": truncated, "xi_reached": [lo, hi], "ic": [float(ic[0]), float(ic[1])]}
    return WaveProfile(grid, u, meta)


# --------------------------------------------------------------------------
# PDE evolution


class Boundary(str, enum.Enum):
    DirichletFromProfile = "dirichlet-from-profile"
    NeumannZero = "neumann-zero"


@dataclass
class PDEState:
    """One snapshot of the method-of-lines solution."""

    x_grid: np.ndarray
    u: np.ndarray
    t: float
    boundary: Boundary
    dt_bound: float
    steps: int = 0

    @property
    def dx(self) -> float:
        return float(self.x_grid[1] - self.x_grid[0])


def _harmonic(a, b):
    return 2.0 * a * b / (a + b)


def _rhs(model: RCDModel, u: np.ndarray, dx: float, neumann: bool, hybrid: bool):
    """Spatial operator on all nodes (ghost mirrors for Neumann)."""
    ue = np.concatenate([[u[0]], u, [u[-1]]]) if neumann else u
    D = np.asarray(model.D(ue), dtype=float) * np.ones_like(ue)
    Df = _harmonic(D[:-1], D[1:])
    flux = Df * np.diff(ue) / dx
    diff = np.diff(flux) / dx
    mid = ue[1:-1]
    B = np.asarray(model.B(mid), dtype=float) * np.ones_like(mid)
    Dm = D[1:-1]
    central = (ue[2:] - ue[:-2]) / (2.0 * dx)
    # B u_x transports with velocity -B: upwind takes the downstream-in-x side when B > 0
    upwind = np.where(B > 0, ue[2:] - mid, mid - ue[:-2]) / dx
    if hybrid:
        peclet = np.abs(B) * dx / (2.0 * Dm)
        adv = B * np.where(peclet <= 1.0, central, upwind)
    else:
        adv = B * upwind
    Q = np.asarray(model.Q(mid), dtype=float) * np.ones_like(mid)
    return diff + adv + Q, float(np.max(D)), float(np.max(np.abs(B))) if B.size else 0.0


def pde_evolve(model: RCDModel, initial: WaveProfile, T: float, dx: float | None = None,
               times: Sequence[float] | None = None,
               boundary: Boundary | str = Boundary.DirichletFromProfile,
               edge: Callable[[float], tuple[float, float]] | None = None,
               u_bound: float = 1e12, cfl: float = 0.4,
               advection: str = "upwind") -> list[PDEState]:
    """Evolve u_t = (D u_x)_x + B u_x + Q from ``initial`` to time T.

    Diffusion uses the conservative flux form with harmonic-mean face D.
    The B u_x term is first-order upwind, or with ``advection="hybrid"``
    central where the cell Peclet number |B| dx / (2D) is at most 1 and
    upwind elsewhere. Time stepping is Heun's method with
    dt <= cfl dx^2 / max D and dt <= cfl dx / max|B|, shortened to land on
    each requested snapshot time.

    Args:
        dx: grid spacing; the initial profile is linearly resampled when it
            differs from the profile's own spacing.
        times: snapshot times in [0, T]; default [0, T].
        boundary: Dirichlet (end values from ``edge(t)``, default: the
            initial end values) or zero-gradient Neumann.
        u_bound: |u| above this, or non-finite values, count as blow-up.

    Raises:
        InstabilityError: blow-up or u leaving the validity interval; the
            last good state is attached.
    """
    if advection not in ("upwind", "hybrid"):
        raise ConfigError(f"advection must be 'upwind' or 'hybrid', got {advection!r}")
    hybrid = advection == "hybrid"
    boundary = Boundary(boundary)
    neumann = boundary is Boundary.NeumannZero
    x = initial.xi_grid
    u = initial.u_values.copy()
    if dx is not None and abs(dx - initial.dx) > 1e-12 * abs(dx):
        n = int(round((x[-1] - x[0]) / dx)) + 1
        xn = np.linspace(x[0], x[-1], n)
        u = np.interp(xn, x, u)
        x = xn
    h = float(x[1] - x[0])
    if edge is None:
        left, right = float(u[0]), float(u[-1])
        edge = lambda t: (left, right)
    times = sorted(set([0.0, float(T)] if times is None else [float(s) for s in times]))
    if times[0] < 0 or times[-1] > T:
        raise ConfigError("snapshot times must lie in [0, T]")
    try:
        model.check(u)
    except DomainError as exc:
        raise DomainError(f"initial profile outside the validity interval: {exc}") from None

    def apply_bc(v, t):
        if not neumann:
            v[0], v[-1] = edge(t)
        return v

    def L(v):
        r, Dmax, Bmax = _rhs(model, v, h, neumann, hybrid)
        if neumann:
            return r, Dmax, Bmax
        out = np.zeros_like(v)
        out[1:-1] = r
        return out, Dmax, Bmax

    snaps = []
    t = 0.0
    steps = 0
    dt_bound = math.inf
    k = 0
    if times[0] == 0.0:
        snaps.append(PDEState(x.copy(), u.copy(), 0.0, boundary, math.nan, 0))
        k = 1
    while k < len(times):
        try:
            r1, Dmax, Bmax = L(u)
            dt_bound = cfl * h * h / Dmax
            if Bmax > 0:
                dt_bound = min(dt_bound, cfl * h / Bmax)
            dt = min(dt_bound, times[k] - t)
            u1 = apply_bc(u + dt * r1, t + dt)
            r2, _, _ = L(u1)
            un = apply_bc(u + 0.5 * dt * (r1 + r2), t + dt)
            model.check(un)
        except (DomainError, FloatingPointError) as exc:
            raise InstabilityError(f"step at t={t:.6g} failed: {exc}",
                                   last_state=PDEState(x.copy(), u.copy(), t, boundary,
                                                       dt_bound, steps)) from None
        if not np.all(np.isfinite(un)) or np.max(np.abs(un)) > u_bound:
            raise InstabilityError(f"blow-up at t={t + dt:.6g}",
                                   last_state=PDEState(x.copy(), u.copy(), t, boundary,
                                                       dt_bound, steps))
        u = un
        t += dt
        steps += 1
        if t >= times[k] - 1e-14 * max(1.0, times[k]):
            t = times[k]
            snaps.append(PDEState(x.copy(), u.copy(), t, boundary, dt_bound, steps))
            k += 1
    return snaps


def write_snapshots_csv(path, snaps: Sequence[PDEState]) -> None:
    """Tidy export: one row per (t, x, u)."""
    lines = [f"# boundary: {json.dumps(snaps[0].boundary.value if snaps else '')}", "t,x,u"]
    for s in snaps:
        lines += [f"{s.t:.17g},{a:.17g},{b:.17g}" for a, b in zip(s.x_grid, s.u)]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


# --------------------------------------------------------------------------
# front tracking


def level_crossing(x: np.ndarray, u: np.ndarray, level: float) -> float:
    """Position where u crosses ``level``, by linear interpolation.

    Raises:
        TrackingError: no crossing or more than one.
    """
    d = np.asarray(u) - level
    s = np.sign(d)
    idx = np.flatnonzero(s[:-1] * s[1:] < 0)
    zeros = np.flatnonzero(s == 0)
    if len(idx) + len(zeros) == 0:
        raise TrackingError(f"profile never crosses level {level}")
    if len(idx) + len(zeros) > 1:
        raise TrackingError(f"profile crosses level {level} {len(idx) + len(zeros)} times")
    if len(zeros):
        return float(x[zeros[0]])
    i = idx[0]
    return float(x[i] + (x[i + 1] - x[i]) * d[i] / (d[i] - d[i + 1]))


@dataclass(frozen=True)
class SpeedEstimate:
    speed: float
    stderr: float
    level: float
    samples: int


def front_speed(snapshots: Sequence[PDEState], level: float | None = None) -> SpeedEstimate:
    """Least-squares slope of the level-crossing position over the last half of snapshots.

    The level defaults to the mean of the first snapshot's end values.

    Raises:
        TrackingError: fewer than 3 snapshots in the fit, or a snapshot
            without exactly one crossing.
    """
    if level is None:
        level = 0.5 * (float(snapshots[0].u[0]) + float(snapshots[0].u[-1]))
    tail = list(snapshots[len(snapshots) // 2:])
    if len(tail) < 3:
        raise TrackingError("need at least 3 snapshots in the second half")
    t = np.array([s.t for s in tail])
    p = np.array([level_crossing(s.x_grid, s.u, level) for s in tail])
    tm, pm = t.mean(), p.mean()
    sxx = float(np.sum((t - tm) ** 2))
    slope = float(np.sum((t - tm) * (p - pm)) / sxx)
    resid = p - (pm + slope * (t - tm))
    dof = len(t) - 2
    stderr = math.sqrt(float(np.sum(resid ** 2)) / dof / sxx) if dof > 0 else math.nan
    return SpeedEstimate(slope, stderr, float(level), len(t))


# --------------------------------------------------------------------------
# fixed points


def fixed_points(model: RCDModel, u_range: tuple[float, float] | None = None,
                 tol: float = 1e-8, samples: int = 2001) -> list[float]:
    """Roots of gamma = Q/D on ``u_range`` (default: validity interval, infinite sides cut at +-10).

    Sign changes on a uniform scan are refined with Brent; scan points and
    range ends where |gamma| <= tol are returned as they are.
    """
    lo, hi = model.interval if u_range is None else u_range
    lo = lo if math.isfinite(lo) else -10.0
    hi = hi if math.isfinite(hi) else 10.0
    lo, hi = max(lo, model.interval[0]), min(hi, model.interval[1])
    grid = np.linspace(lo, hi, samples)
    g = np.asarray(model.gamma_fn(grid), dtype=float) * np.ones_like(grid)
    roots = [float(x) for x, v in zip(grid, g) if abs(v) <= tol]
    for i in range(samples - 1):
        if g[i] * g[i + 1] < 0 and abs(g[i]) > tol and abs(g[i + 1]) > tol:
            roots.append(find_root(lambda s: float(model.gamma_fn(s)), grid[i], grid[i + 1],
                                   Tolerance(rel=1e-14, abs=1e-15)))
    roots.sort()
    out = []
    for r in roots:
        if not out or abs(r - out[-1]) > 1e-8 * max(1.0, abs(r)):
            out.append(r)
    return out


# --------------------------------------------------------------------------
# residual meters and the verification report


@dataclass
class ResidualStats:
    max_abs: float
    max_rel: float
    l2: float
    worst_t: float


def tw_residuals(sol: ParametricSolution, model: RCDModel | None = None,
                 V_f: float | None = None, samples=None):
    """Travelling-wave residual at the interior samples.

    Coefficients are evaluated at the sampled u; u' and u'' come from the
    construction's chain-rule expressions in the parameter. The relative
    residual divides by max(1, |u''|, |alpha u'^2|, |beta u'|, |gamma|).

    Returns:
        (t, absolute residuals, relative residuals) arrays.
    """
    model = model or sol.model
    V_f = sol.V_f if V_f is None else V_f
    tw = travelling_wave_coefficients(model, V_f)
    t = sol.t[1:-1] if samples is None else np.asarray(samples[0])
    u = sol.u[1:-1] if samples is None else np.asarray(samples[1])
    ra, rr = [], []
    for ti, ui in zip(t, u):
        s = sol.slope(ti)
        terms = (sol.curvature(ti), float(tw.alpha_fn(ui)) * s * s, float(tw.beta_fn(ui)) * s,
                 float(tw.gamma_fn(ui)))
        r = sum(terms)
        ra.append(abs(r))
        rr.append(abs(r) / max(1.0, *(abs(x) for x in terms)))
    return np.asarray(t), np.asarray(ra), np.asarray(rr)


def profile_residual(profile: WaveProfile, model: RCDModel, V_f: float) -> float:
    """Largest relative travelling-wave residual of a uniform-grid profile.

    u' and u'' come from fourth-order central differences, so the check is
    independent of how the profile was produced; the two points at each
    end are skipped. Normalization as in ``tw_residuals``.
    """
    u, h = profile.u_values, profile.dx
    d1 = (u[:-4] - 8 * u[1:-3] + 8 * u[3:-1] - u[4:]) / (12 * h)
    d2 = (-u[:-4] + 16 * u[1:-3] - 30 * u[2:-2] + 16 * u[3:-1] - u[4:]) / (12 * h * h)
    uc = u[2:-2]
    tw = travelling_wave_coefficients(model, V_f)
    ones = np.ones_like(uc)
    terms = np.stack([d2, tw.alpha_fn(uc) * ones * d1 * d1, tw.beta_fn(uc) * ones * d1,
                      tw.gamma_fn(uc) * ones])
    scale = np.maximum(1.0, np.max(np.abs(terms), axis=0))
    return float(np.max(np.abs(terms.sum(axis=0)) / scale))


@dataclass
class VerifyConfig:
    """Tolerances and switches for ``verify``."""

    residual_tol: float = 1e-6
    first_integral_tol: float = 1e-7
    fin_tol: float = 1e-7
    shooter_tol: float = 1e-5
    shoot_span: float = 5.0
    shoot_points: int = 513
    pde: bool = False
    pde_T: float = 2.0
    pde_points: int = 2048
    pde_tol: float = 0.01
    pde_u_margin: float = 0.05
    speed_tol: float = 0.05
    min_samples: int = 5

    @classmethod
    def from_dict(cls, doc: dict) -> "VerifyConfig":
        unknown = set(doc) - set(cls.__dataclass_fields__)
        if unknown:
            raise ConfigError(f"verify config: unknown key(s) {sorted(unknown)}")
        return cls(**doc)


@dataclass
class VerificationReport:
    residual_max: float
    residual_l2: float
    residual_rel_max: float
    oracle_l2: float
    front_speed: float | None
    front_speed_stderr: float | None
    fixed_points: list
    flags: dict
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.flags.values())

    def to_dict(self) -> dict:
        d = asdict(self)
        d["passed"] = self.passed
        return _finite_json(d)

    def to_json(self, path=None) -> str:
        text = json.dumps(self.to_dict(), indent=2, sort_keys=True)
        if path is not None:
            with open(path, "w") as fh:
                fh.write(text + "\n")
        return text


def _finite_json(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (np.floating, np.integer)):
        return _finite_json(v.item())
    if isinstance(v, (np.bool_,)):
        return bool(v)
    if isinstance(v, dict):
        return {str(k): _finite_json(x) for k, x in v.items()}
    if isinstance(v, (list, tuple, np.ndarray)):
        return [_finite_json(x) for x in v]
    if isinstance(v, enum.Enum):
        return v.value
    return v


def _shooter_distance(sol: ParametricSolution, model, V_f, cfg: VerifyConfig):
    u0, du0 = (float(sol.u_of(_t_at_xi0(sol))), sol.slope(_t_at_xi0(sol)))
    lo = max(sol.xi[0], -cfg.shoot_span)
    hi = min(sol.xi[-1], cfg.shoot_span)
    prof = shoot_wave_ode(model, V_f, (u0, du0), (lo, hi), n=cfg.shoot_points)
    grid = prof.xi_grid
    ref = sol.interpolate(grid)
    scale = max(1.0, float(np.max(np.abs(ref))))
    return float(np.sqrt(np.mean((prof.u_values - ref) ** 2))) / scale, prof.metadata


def _t_at_xi0(sol: ParametricSolution) -> float:
    i = int(np.argmin(np.abs(sol.xi)))
    return float(sol.t[i])


def pde_translation_test(sol: ParametricSolution, model: RCDModel, V_f: float,
                         cfg: VerifyConfig):
    """Evolve the sampled profile under the PDE and compare with its V_f T translate.

    The window keeps u at least ``pde_u_margin`` (relative) inside the
    validity interval; Dirichlet end values follow the exact wave. The
    comparison uses the middle half of the window.

    Returns:
        (relative L2 distance, front-speed estimate or None, details).
    """
    lo_u, hi_u = model.interval
    span = float(np.max(sol.u) - np.min(sol.u))
    ok = np.ones_like(sol.u, dtype=bool)
    if math.isfinite(hi_u):
        ok &= sol.u <= hi_u - cfg.pde_u_margin * max(abs(hi_u), span)
    if math.isfinite(lo_u):
        ok &= sol.u >= lo_u
    idx = np.flatnonzero(ok)
    if len(idx) < 16:
        raise DomainError("not enough samples away from the validity edge for the PDE test")
    # longest run of admissible samples
    breaks = np.flatnonzero(np.diff(idx) > 1)
    runs = np.split(idx, breaks + 1)
    run = max(runs, key=len)
    a, b = float(sol.xi[run[0]]), float(sol.xi[run[-1]])
    shift = V_f * cfg.pde_T
    # the translated window must still be covered by samples for the edge values
    grid = np.linspace(a + max(0.0, shift), b + min(0.0, shift), cfg.pde_points)
    if grid[-1] - grid[0] <= 0:
        raise DomainError("window too short for the requested translation")
    prof = WaveProfile(grid, sol.interpolate(grid), {"source": Source.Parametric.value})
    xa, xb = float(grid[0]), float(grid[-1])

    def edge(t):
        return (float(sol.interpolate(xa - V_f * t)), float(sol.interpolate(xb - V_f * t)))

    times = np.linspace(0.0, cfg.pde_T, 9)
    snaps = pde_evolve(model, prof, cfg.pde_T, times=times, edge=edge, advection="hybrid")
    last = snaps[-1]
    n = len(grid)
    mid = slice(n // 4, 3 * n // 4)
    exact = sol.interpolate(grid[mid] - shift)
    err = float(np.linalg.norm(last.u[mid] - exact) / np.linalg.norm(exact))
    speed = None
    try:
        speed = front_speed(snaps)
    except TrackingError:
        pass
    return err, speed, {"pde_window": [xa, xb], "pde_steps": last.steps,
                        "pde_dt": last.dt_bound}


def verify(solution: ParametricSolution, model: RCDModel | None = None,
           V_f: float | None = None, config: VerifyConfig | None = None,
           samples=None) -> VerificationReport:
    """Run the residual, first-integral, shooter and optional PDE checks.

    Args:
        samples: optional (t, u) arrays to check instead of the stored
            interior samples (e.g. values read back from a CSV file).

    Raises:
        ConfigError: fewer than ``config.min_samples`` samples.
    """
    cfg = config or VerifyConfig()
    model = model or solution.model
    V_f = solution.V_f if V_f is None else float(V_f)
    if len(solution) < cfg.min_samples:
        raise ConfigError(f"solution has {len(solution)} samples; need at least {cfg.min_samples}")
    flags, details = {}, {}
    t, ra, rr = tw_residuals(solution, model, V_f, samples)
    res_max = float(np.max(ra)) if ra.size else 0.0
    res_rel = float(np.max(rr)) if rr.size else 0.0
    res_l2 = float(np.sqrt(np.mean(ra ** 2))) if ra.size else 0.0
    flags["residual"] = bool(res_rel <= cfg.residual_tol)
    details["residual_worst_t"] = float(t[int(np.argmax(rr))]) if rr.size else math.nan

    if solution.first_integral is not None:
        tt = t
        uu = solution.u[1:-1] if samples is None else np.asarray(samples[1])
        dev = 0.0
        for ti, ui in zip(tt, uu):
            # slope * f * theta / Q with Q evaluated at the sampled u
            q = float(model.Q(ui))
            if q == 0.0:
                continue
            dev = max(dev, abs(solution.slope(ti) * float(model.f_fn(V_f, ui)) * ti / q - 1.0))
        details["first_integral_dev"] = dev
        flags["first_integral"] = bool(dev <= cfg.first_integral_tol)

    if solution.route is Route.Lemke and solution.state is not None:
        from .lemke import fin_residual

        fin = max((fin_residual(solution, ti, relative=True) for ti in t), default=0.0)
        details["fin_residual_rel"] = float(fin)
        flags["lemke_equation"] = bool(fin <= cfg.fin_tol)

    oracle = math.nan
    try:
        oracle, meta = _shooter_distance(solution, model, V_f, cfg)
        details["shooter"] = {"truncated": meta["truncated"], "xi_reached": meta["xi_reached"]}
        flags["shooter"] = bool(oracle <= cfg.shooter_tol)
    except (AbelWaveError, ValueError) as exc:
        details["shooter_error"] = str(exc)
        flags["shooter"] = False

    speed = stderr = None
    if cfg.pde:
        try:
            err, est, info = pde_translation_test(solution, model, V_f, cfg)
            details.update(info)
            details["pde_l2_rel"] = err
            flags["pde_translation"] = bool(err <= cfg.pde_tol)
            if est is not None:
                speed, stderr = est.speed, est.stderr
                details["front_speed_rel_dev"] = abs(speed - V_f) / max(abs(V_f), 1e-12)
        except (AbelWaveError, ValueError) as exc:
            details["pde_error"] = str(exc)
            flags["pde_translation"] = False

    try:
        lo, hi = float(np.min(solution.u)), float(np.max(solution.u))
        pad = 0.1 * max(hi - lo, 1e-3)
        rng = (max(model.interval[0], lo - pad), min(model.interval[1], hi + pad))
        fps = fixed_points(model, rng)
    except (AbelWaveError, ValueError) as exc:
        details["fixed_points_error"] = str(exc)
        fps = []

    return VerificationReport(res_max, res_l2, res_rel, oracle, speed, stderr, fps, flags,
                              details)
