"""Sampled parametric solutions and uniform-grid wave profiles, with CSV export."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping

import numpy as np

from .errors import ConfigError, DomainError
from .numerics import derivative


class Route(str, enum.Enum):
    Chiellini = "chiellini"
    Lemke = "lemke"
    ClosedForm = "closed-form"


class Source(str, enum.Enum):
    Parametric = "parametric"
    Shooter = "shooter"
    PDESlice = "pde-slice"


def hermite_eval(x, y, dy, xq):
    """Piecewise cubic Hermite interpolation; ``x`` ascending."""
    xq = np.asarray(xq, dtype=float)
    i = np.clip(np.searchsorted(x, xq, side="right") - 1, 0, len(x) - 2)
    h = x[i + 1] - x[i]
    s = (xq - x[i]) / h
    h00 = (1 + 2 * s) * (1 - s) ** 2
    h10 = s * (1 - s) ** 2
    h01 = s * s * (3 - 2 * s)
    h11 = s * s * (s - 1)
    return h00 * y[i] + h10 * h * dy[i] + h01 * y[i + 1] + h11 * h * dy[i + 1]


@dataclass
class ParametricSolution:
    """A travelling wave sampled along a parameter t (theta or eta).

    Samples are ordered by ascending ``xi``. The callables evaluate the
    underlying exact construction at any admissible parameter value:
    ``u_of(t)``, ``dxi_dt(t)`` and ``du_dt(t)``. ``model`` and ``V_f`` name
    the travelling-wave ODE the curve solves (for rescaled constructions
    these describe the rescaled equation).
    """

    route: Route
    param: str
    t: np.ndarray
    xi: np.ndarray
    u: np.ndarray
    constants: dict
    model: object
    V_f: float
    u_of: Callable[[float], float]
    dxi_dt: Callable[[float], float]
    du_dt: Callable[[float], float]
    ic: tuple[float, float] | None = None
    xi_of: Callable[[float], float] | None = None
    first_integral: Callable[[float, float], float] | None = None
    notes: list = field(default_factory=list)
    d2u: Callable[[float], float] | None = None
    state: object | None = None

    def __post_init__(self):
        self.t = np.asarray(self.t, dtype=float)
        self.xi = np.asarray(self.xi, dtype=float)
        self.u = np.asarray(self.u, dtype=float)
        if not (len(self.t) == len(self.xi) == len(self.u)):
            raise ValueError("sample columns differ in length")
        if len(self.xi) > 1 and not np.all(np.diff(self.xi) > 0):
            raise ValueError("xi must be strictly increasing along samples")

    def __len__(self):
        return len(self.t)

    @property
    def du_dxi(self) -> np.ndarray:
        # samples are fixed after construction, so the exact slopes are cached
        cached = self.__dict__.get("_du_dxi")
        if cached is None or len(cached) != len(self.t):
            cached = np.array([self.du_dt(t) / self.dxi_dt(t) for t in self.t])
            self.__dict__["_du_dxi"] = cached
        return cached

    def slope(self, t: float) -> float:
        return self.du_dt(t) / self.dxi_dt(t)

    def curvature(self, t: float) -> float:
        """d2u/dxi2 at parameter t.

        Uses the route's chain-rule expression when one was supplied, else
        extrapolated differences of the slope in t.
        """
        if self.d2u is not None:
            return self.d2u(t)
        h = self._step(t)
        return derivative(self.slope, t, h) / self.dxi_dt(t)

    def _step(self, t: float) -> float:
        lo, hi = float(self.t.min()), float(self.t.max())
        room = min(t - lo, hi - t)
        h = 1e-3 * (1.0 + abs(t))
        if room > 0:
            h = min(h, 0.5 * room)
        return h

    def interpolate(self, xq):
        """u at arbitrary xi inside the sampled window (cubic Hermite with exact slopes)."""
        xq = np.asarray(xq, dtype=float)
        if np.any(xq < self.xi[0] - 1e-12) or np.any(xq > self.xi[-1] + 1e-12):
            raise DomainError(f"xi outside sampled window [{self.xi[0]}, {self.xi[-1]}]")
        return hermite_eval(self.xi, self.u, self.du_dxi, xq)

    def window(self, xi_lo: float, xi_hi: float) -> "ParametricSolution":
        mask = (self.xi >= xi_lo) & (self.xi <= xi_hi)
        return self.replace_samples(self.t[mask], self.xi[mask], self.u[mask])

    def replace_samples(self, t, xi, u) -> "ParametricSolution":
        return ParametricSolution(self.route, self.param, t, xi, u, dict(self.constants),
                                  self.model, self.V_f, self.u_of, self.dxi_dt, self.du_dt,
                                  self.ic, self.xi_of, self.first_integral, list(self.notes),
                                  self.d2u, self.state)

    def to_profile(self, n: int = 256, xi_lo: float | None = None,
                   xi_hi: float | None = None) -> "WaveProfile":
        a = self.xi[0] if xi_lo is None else xi_lo
        b = self.xi[-1] if xi_hi is None else xi_hi
        grid = np.linspace(a, b, n)
        return WaveProfile(grid, self.interpolate(grid),
                           {"V_f": self.V_f, "model": getattr(self.model, "name", ""),
                            "source": Source.Parametric.value})


@dataclass
class WaveProfile:
    """u on a uniform xi grid."""

    xi_grid: np.ndarray
    u_values: np.ndarray
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        self.xi_grid = np.asarray(self.xi_grid, dtype=float)
        self.u_values = np.asarray(self.u_values, dtype=float)
        if len(self.xi_grid) < 16:
            raise ValueError("a WaveProfile needs at least 16 points")
        d = np.diff(self.xi_grid)
        if not np.all(np.abs(d - d[0]) <= 1e-12 * max(1.0, np.max(np.abs(self.xi_grid)))):
            raise ValueError("WaveProfile grid must be uniform")
        if not np.all(np.isfinite(self.u_values)):
            raise ValueError("WaveProfile values must be finite")

    @property
    def dx(self) -> float:
        return float(self.xi_grid[1] - self.xi_grid[0])


def _fmt(x) -> str:
    return format(float(x), ".17g")


def _jsonable(v):
    if isinstance(v, float) and not math.isfinite(v):
        return repr(v)
    if isinstance(v, (np.floating,)):
        return _jsonable(float(v))
    if isinstance(v, enum.Enum):
        return v.value
    if isinstance(v, Mapping):
        return {k: _jsonable(x) for k, x in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(x) for x in v]
    return v


def write_solution_csv(path, sol: ParametricSolution, extra: Mapping | None = None) -> None:
    """Columns theta, xi, u; ``#`` header lines carry route, k and constants as JSON."""
    header = {"route": sol.route.value, "parameter": sol.param,
              "k": sol.constants.get("k"), "V_f": sol.V_f,
              "model": getattr(sol.model, "name", ""), "constants": sol.constants}
    if extra:
        header.update(extra)
    lines = [f"# {key}: {json.dumps(_jsonable(val), sort_keys=True)}" for key, val in header.items()]
    lines.append("theta,xi,u")
    lines += [f"{_fmt(a)},{_fmt(b)},{_fmt(c)}" for a, b, c in zip(sol.t, sol.xi, sol.u)]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")


def read_solution_csv(path):
    """Return (header dict, theta, xi, u) from a file written by ``write_solution_csv``."""
    header = {}
    rows = []
    with open(path) as fh:
        for line in fh:
            line = line.rstrip("\n")
            if not line:
                continue
            if line.startswith("#"):
                key, _, val = line[1:].strip().partition(":")
                try:
                    header[key.strip()] = json.loads(val)
                except json.JSONDecodeError:
                    header[key.strip()] = val.strip()
            elif line.startswith("theta"):
                if line.split(",") != ["theta", "xi", "u"]:
                    raise ConfigError(f"{path}: unexpected columns {line!r}")
            else:
                rows.append([float(x) for x in line.split(",")])
    data = np.array(rows, dtype=float).reshape(-1, 3)
    return header, data[:, 0], data[:, 1], data[:, 2]


def write_profile_csv(path, profile: WaveProfile, extra: Mapping | None = None) -> None:
    meta = dict(profile.metadata)
    if extra:
        meta.update(extra)
    lines = [f"# {k}: {json.dumps(_jsonable(v), sort_keys=True)}" for k, v in meta.items()]
    lines.append("xi,u")
    lines += [f"{_fmt(a)},{_fmt(b)}" for a, b in zip(profile.xi_grid, profile.u_values)]
    with open(path, "w", newline="\n") as fh:
        fh.write("\n".join(lines) + "\n")
