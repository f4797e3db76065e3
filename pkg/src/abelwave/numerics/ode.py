"""Dormand-Prince 5(4) integrator with PI step control and dense output."""

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from ..errors import IntegrationError
from .tolerance import DEFAULT_TOL, Tolerance

_C = np.array([0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0])
_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
]
_B = np.array([35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84])
# 5th-order minus embedded 4th-order weights (7 stages, FSAL).
_E = np.array([-71 / 57600, 0.0, 71 / 16695, -71 / 1920, 17253 / 339200, -22 / 525, 1 / 40])
# Shampine's 4th-order continuous extension: y(t + s h) = y + h K^T (P @ [s, s^2, s^3, s^4]).
_P = np.array([
    [1.0, -8048581381 / 2820520608, 8663915743 / 2820520608, -12715105075 / 11282082432],
    [0.0, 0.0, 0.0, 0.0],
    [0.0, 131558114200 / 32700410799, -68118460800 / 10900136933, 87487479700 / 32700410799],
    [0.0, -1754552775 / 470086768, 14199869525 / 1410260304, -10690763975 / 1880347072],
    [0.0, 127303824393 / 49829197408, -318862633887 / 49829197408, 701980252875 / 199316789632],
    [0.0, -282668133 / 205662961, 2019193451 / 616988883, -1453857185 / 822651844],
    [0.0, 40617522 / 29380423, -110615467 / 29380423, 69997945 / 29380423],
])

_SAFETY = 0.9
_MIN_FACTOR = 0.2
_MAX_FACTOR = 10.0
# PI controller exponents (Hairer/Wanner, order 5 pair).
_ALPHA = 0.7 / 5
_BETA = 0.4 / 5


@dataclass
class Trajectory:
    """Accepted steps of an integration with per-step dense output.

    ``t`` is strictly monotone (decreasing when integrating backwards).
    ``Q[i]`` holds ``K^T P`` for the step from ``t[i]`` to ``t[i+1]``.
    """

    t: list = field(default_factory=list)
    y: list = field(default_factory=list)
    Q: list = field(default_factory=list)

    @property
    def t_end(self) -> float:
        return self.t[-1]

    def _arrays(self):
        n = len(self.Q)
        if getattr(self, "_cache_n", -1) != n:
            self._ts = np.asarray(self.t[: n + 1], dtype=float)
            self._ys = np.asarray(self.y[: n + 1], dtype=float)
            self._Qs = np.asarray(self.Q, dtype=float)
            self._cache_n = n
        return self._ts, self._ys, self._Qs

    def __call__(self, tq):
        """Dense-output evaluation at scalar or array ``tq`` inside the span."""
        if len(self.Q) == 0:
            raise ValueError("empty trajectory")
        ts, ys, Qs = self._arrays()
        scalar = np.ndim(tq) == 0
        tq = np.atleast_1d(np.asarray(tq, dtype=float))
        sign = 1.0 if ts[-1] >= ts[0] else -1.0
        key = sign * ts
        kq = sign * tq
        slack = 1e-12 * (1.0 + np.abs(key[[0, -1]]))
        if np.any(kq < key[0] - slack[0]) or np.any(kq > key[-1] + slack[1]):
            raise ValueError(f"query outside trajectory span [{ts[0]}, {ts[-1]}]")
        i = np.clip(np.searchsorted(key, kq, side="right") - 1, 0, len(ts) - 2)
        h = ts[i + 1] - ts[i]
        s = (tq - ts[i]) / h
        powers = np.stack([s, s * s, s ** 3, s ** 4], axis=1)
        out = ys[i] + h[:, None] * np.einsum("mdk,mk->md", Qs[i], powers)
        return out[0] if scalar else out


def _rms(x):
    return float(np.sqrt(np.mean(x * x)))


def integrate_ode(
    rhs: Callable[[float, np.ndarray], np.ndarray],
    y0,
    t0: float,
    t1: float,
    tol: Tolerance = DEFAULT_TOL,
    h0: float | None = None,
    event: Callable[[float, np.ndarray], bool] | None = None,
) -> Trajectory:
    """Integrate ``y' = rhs(t, y)`` from ``t0`` to ``t1`` (either direction).

    Args:
        event: optional predicate; integration stops after the first accepted
            step whose end state satisfies it (the step is kept).

    Raises:
        IntegrationError: step size underflow, non-finite rhs, or step cap.
            The partial trajectory is attached.
    """
    y = np.atleast_1d(np.asarray(y0, dtype=float)).copy()
    t = float(t0)
    direction = 1.0 if t1 >= t0 else -1.0
    traj = Trajectory([t], [y.copy()], [])
    if t1 == t0:
        return traj

    f = np.asarray(rhs(t, y), dtype=float)
    scale = tol.abs + tol.rel * np.abs(y)
    if h0 is None:
        d0, d1 = _rms(y / scale), _rms(f / scale)
        h = 1e-6 if d0 < 1e-5 or d1 < 1e-5 else 0.01 * d0 / d1
        h = min(h, abs(t1 - t0))
    else:
        h = abs(h0)
    err_prev = 1e-4
    K = np.empty((7, y.size))
    steps = 0
    while direction * (t1 - t) > 0:
        steps += 1
        if steps > 100 * tol.max_iter:
            raise IntegrationError(f"step cap reached at t={t}", t_last=t, trajectory=traj)
        h = min(h, abs(t1 - t))
        if h < 1e-14 * max(1.0, abs(t)):
            raise IntegrationError(f"step size underflow at t={t}", t_last=t, trajectory=traj)
        hs = direction * h
        K[0] = f
        for s in range(1, 6):
            dy = hs * (np.asarray(_A[s]) @ K[:s])
            K[s] = rhs(t + _C[s] * hs, y + dy)
        y_new = y + hs * (_B @ K[:6])
        f_new = np.asarray(rhs(t + hs, y_new), dtype=float)
        K[6] = f_new
        if not (np.all(np.isfinite(y_new)) and np.all(np.isfinite(f_new))):
            h *= 0.25
            continue
        scale = tol.abs + tol.rel * np.maximum(np.abs(y), np.abs(y_new))
        err = _rms(hs * (_E @ K) / scale)
        if err <= 1.0:
            traj.Q.append(K.T @ _P)
            t = t + hs
            if direction * (t - t1) > 0 or abs(t - t1) < 1e-15 * max(1.0, abs(t1)):
                t = t1
            y, f = y_new, f_new
            traj.t.append(t)
            traj.y.append(y.copy())
            factor = _SAFETY * max(err, 1e-10) ** -_ALPHA * err_prev ** _BETA
            h *= min(_MAX_FACTOR, max(_MIN_FACTOR, factor))
            err_prev = max(err, 1e-4)
            if event is not None and event(t, y):
                break
        else:
            h *= max(_MIN_FACTOR, _SAFETY * err ** -0.2)
    return traj
