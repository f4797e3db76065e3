"""Adaptive marching along a curve parameter with bounded xi and u spacing."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .errors import AbelWaveError, ConvergenceError, DomainError, InversionError
from .numerics import DEFAULT_TOL, Tolerance, quad

# relative distance at which the walk stops short of a finite parameter end
END_GAP = 1e-8


@dataclass
class MarchSettings:
    """Spacing targets for sampled parametric curves.

    Attributes:
        dxi: largest allowed xi gap between consecutive samples.
        du_frac: largest allowed u gap, relative to max(|u0|, |u|).
        xi_max: stop once |xi - xi0| exceeds this.
        t_cap: stop once |t| exceeds this on unbounded parameter ranges.
        max_nodes: hard cap on samples per direction.
        du_floor: lower bound on the u scale in the du_frac test, so curves
            starting at u = 0 can move.
    """

    dxi: float = 0.05
    du_frac: float = 0.02
    xi_max: float = 50.0
    t_cap: float = 1e8
    max_nodes: int = 20000
    du_floor: float = 0.0

    def __post_init__(self):
        if not (self.dxi > 0 and self.du_frac > 0 and self.xi_max > 0):
            raise ValueError("dxi, du_frac and xi_max must be positive")


@dataclass
class MarchResult:
    t: list = field(default_factory=list)
    xi: list = field(default_factory=list)
    u: list = field(default_factory=list)
    stop: str = ""


_STOP_ERRORS = (InversionError, DomainError)


def march(t0: float, xi0: float, u0: float, end: float, u_of: Callable[[float], float],
          dxi_dt: Callable[[float], float], settings: MarchSettings = MarchSettings(),
          tol: Tolerance = DEFAULT_TOL, strict: bool = False,
          xi_step: Callable[[float, float], float] | None = None,
          vectorized: bool = False) -> MarchResult:
    """Walk from t0 towards ``end`` (may be +-inf), excluding t0 itself.

    A trial step is accepted when its xi increment and u increment both meet
    the targets; otherwise it is halved. Failure to evaluate u (the curve
    leaves the validity interval) also halves the step, so the walk converges
    geometrically onto such a boundary and stops there.

    Args:
        xi_step: optional exact xi increment ``(ta, tb) -> xi(tb) - xi(ta)``;
            defaults to adaptive quadrature of ``dxi_dt``.
        strict: raise InversionError if a boundary is met before ``end``.
        vectorized: ``dxi_dt`` accepts arrays of quadrature nodes.
    """
    res = MarchResult()
    qtol = Tolerance(tol.rel, tol.abs, min(tol.max_iter, 64))

    def step_quad(a, b):
        try:
            return quad(dxi_dt, a, b, qtol, vectorized=vectorized)
        except ConvergenceError as exc:
            # steps pressed against a singular end carry node round-off noise;
            # keep the estimate if its error is far below the spacing target
            if exc.estimate is not None and exc.error <= 1e-6 * settings.dxi:
                return exc.estimate
            raise

    direction = 1.0 if end > t0 else -1.0
    finite_end = math.isfinite(end)
    t, xi, u = float(t0), float(xi0), float(u0)
    h = 1e-3 * (1.0 + abs(t0))
    if finite_end:
        h = min(h, 0.25 * abs(end - t0))
    boundary = False
    while True:
        if len(res.t) >= settings.max_nodes:
            res.stop = "max_nodes"
            break
        if finite_end:
            room = abs(end - t)
            if room <= END_GAP * max(1.0, abs(end)):
                res.stop = "end"
                break
            h = min(h, 0.5 * room)
        elif abs(t) >= settings.t_cap:
            res.stop = "t_cap"
            break
        if h <= 1e-14 * max(1.0, abs(t)):
            res.stop = "boundary" if boundary else "stalled"
            break
        tn = t + direction * h
        try:
            un = float(u_of(tn))
            dx = xi_step(t, tn) if xi_step else step_quad(t, tn)
        except _STOP_ERRORS:
            boundary = True
            h *= 0.5
            continue
        except AbelWaveError:
            h *= 0.5
            continue
        du_lim = settings.du_frac * max(abs(u0), abs(u), settings.du_floor, 1e-300)
        if not (math.isfinite(dx) and math.isfinite(un)) or abs(dx) > settings.dxi \
                or abs(un - u) > du_lim:
            h *= 0.5
            continue
        t, xi, u = tn, xi + dx, un
        res.t.append(t)
        res.xi.append(xi)
        res.u.append(u)
        if abs(xi - xi0) >= settings.xi_max:
            res.stop = "xi_max"
            break
        h *= 1.6
    if strict and res.stop in ("boundary", "stalled"):
        raise InversionError(f"curve not continuable past t={t:.17g} towards {end}")
    return res


def assemble(t0, xi0, u0, left: MarchResult, right: MarchResult):
    """Join two marches around (t0, xi0, u0) into arrays ordered by ascending xi."""
    t = np.array(left.t[::-1] + [t0] + right.t, dtype=float)
    xi = np.array(left.xi[::-1] + [xi0] + right.xi, dtype=float)
    u = np.array(left.u[::-1] + [u0] + right.u, dtype=float)
    if len(xi) > 1 and xi[-1] < xi[0]:
        t, xi, u = t[::-1], xi[::-1], u[::-1]
    keep = np.concatenate([[True], np.diff(xi) > 0])
    # drop samples where xi stagnated at round-off level
    while not np.all(np.diff(xi[keep]) > 0):
        idx = np.flatnonzero(keep)
        bad = idx[1:][np.diff(xi[idx]) <= 0]
        keep[bad] = False
    return t[keep], xi[keep], u[keep]
