"""Bracketed scalar root finding (Brent-Dekker)."""

import math
from typing import Callable

from ..errors import BracketError, ConvergenceError
from .tolerance import DEFAULT_TOL, Tolerance

_EPS = 2.220446049250313e-16


def find_root(f: Callable[[float], float], lo: float, hi: float,
              tol: Tolerance = DEFAULT_TOL) -> float:
    """Root of ``f`` inside ``[lo, hi]``.

    Bisection safeguards inverse quadratic / secant steps, so convergence is
    guaranteed once ``f(lo) * f(hi) <= 0`` and superlinear near simple roots.
    The returned bracket half-width is below ``tol.abs + tol.rel * |root|``
    (with a floor of a few ulps).

    Raises:
        BracketError: no sign change on ``[lo, hi]``.
        ConvergenceError: ``tol.max_iter`` iterations exhausted.
    """
    a, b = float(lo), float(hi)
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if math.isnan(fa) or math.isnan(fb):
        raise BracketError(f"f is NaN at a bracket end: f({a})={fa}, f({b})={fb}")
    if (fa > 0) == (fb > 0):
        raise BracketError(f"no sign change: f({a})={fa}, f({b})={fb}")

    c, fc = a, fa
    d = e = b - a
    for _ in range(tol.max_iter):
        if (fb > 0) == (fc > 0):
            c, fc = a, fa
            d = e = b - a
        if abs(fc) < abs(fb):
            a, b, c = b, c, b
            fa, fb, fc = fb, fc, fb
        tol1 = 2.0 * _EPS * abs(b) + 0.5 * max(tol.abs, tol.rel * abs(b))
        m = 0.5 * (c - b)
        if abs(m) <= tol1 or fb == 0.0:
            return b
        if abs(e) >= tol1 and abs(fa) > abs(fb):
            s = fb / fa
            if a == c:
                p = 2.0 * m * s
                q = 1.0 - s
            else:
                q = fa / fc
                r = fb / fc
                p = s * (2.0 * m * q * (q - r) - (b - a) * (r - 1.0))
                q = (q - 1.0) * (r - 1.0) * (s - 1.0)
            if p > 0:
                q = -q
            else:
                p = -p
            if 2.0 * p < min(3.0 * m * q - abs(tol1 * q), abs(e * q)):
                e, d = d, p / q
            else:
                d = e = m
        else:
            d = e = m
        a, fa = b, fb
        b += d if abs(d) > tol1 else math.copysign(tol1, m)
        fb = f(b)
    raise ConvergenceError(f"find_root: {tol.max_iter} iterations without convergence",
                           estimate=b, error=abs(c - b))
