"""Real-argument error function and Gauss hypergeometric function."""

import math

from ..errors import ConvergenceError, DomainError

_TWO_OVER_SQRT_PI = 2.0 / math.sqrt(math.pi)
_EPS = 2.220446049250313e-16


def _erf_series(x):
    # erf(x) = 2/sqrt(pi) * exp(-x^2) * sum_n (2x^2)^n x / (1*3*...*(2n+1)); all terms positive.
    x2 = x * x
    term = x
    total = x
    n = 0
    while abs(term) > _EPS * 0.25 * abs(total):
        n += 1
        term *= 2.0 * x2 / (2 * n + 1)
        total += term
    return _TWO_OVER_SQRT_PI * math.exp(-x2) * total


def _erfc_cf(x):
    # Continued fraction for erfc, x > 0, evaluated with modified Lentz.
    tiny = 1e-300
    b = x * x + 0.5
    f = b if b != 0 else tiny
    c = f
    d = 0.0
    for n in range(1, 500):
        a = -n * (n - 0.5)
        b += 2.0
        d = b + a * d
        d = 1.0 / (d if d != 0 else tiny)
        c = b + a / c
        if c == 0:
            c = tiny
        delta = c * d
        f *= delta
        if abs(delta - 1.0) < 1e-16:
            break
    return x * math.exp(-x * x) / (math.sqrt(math.pi) * f)


def erf(x: float) -> float:
    """Error function, absolute error below 1e-14 for all finite ``x``."""
    x = float(x)
    if x != x:
        return x
    if x < 0:
        return -erf(-x)
    if x < 3.0:
        return _erf_series(x)
    if x > 6.5:
        return 1.0
    return 1.0 - _erfc_cf(x)


def erfc(x: float) -> float:
    x = float(x)
    if x < 3.0:
        return 1.0 - erf(x)
    return _erfc_cf(x)


def _is_nonpositive_int(v):
    return v <= 0 and float(v).is_integer()


def _series(a, b, c, z, max_terms=20000):
    term = 1.0
    total = 1.0
    for k in range(max_terms):
        term *= (a + k) * (b + k) / ((c + k) * (k + 1)) * z
        total += term
        if term == 0.0 or abs(term) <= 0.25 * _EPS * abs(total):
            return total
    raise ConvergenceError(f"hyp2f1 series did not converge at z={z}", estimate=total)


def hyp2f1(a: float, b: float, c: float, z: float) -> float:
    """Gauss hypergeometric function 2F1(a, b; c; z) for real arguments, z < 1.

    Power series for |z| <= 1/2; Pfaff transformation z -> z/(z-1) for
    -2 <= z < -1/2; the 1/z connection formula below -2; the 1-z connection
    formula on (1/2, 1). Relative accuracy about 1e-13 away from cancellation.

    Raises:
        DomainError: ``c`` a non-positive integer, ``z >= 1``, or a
            connection formula needed at an integer parameter difference.
    """
    a, b, c, z = float(a), float(b), float(c), float(z)
    if _is_nonpositive_int(c):
        raise DomainError(f"hyp2f1: c={c} is a non-positive integer")
    if z == 0.0 or a == 0.0 or b == 0.0:
        return 1.0
    if _is_nonpositive_int(a) or _is_nonpositive_int(b):
        return _series(a, b, c, z)
    if z >= 1.0:
        raise DomainError(f"hyp2f1: z={z} >= 1 is outside the real principal branch")
    if abs(z) <= 0.5:
        return _series(a, b, c, z)
    if -2.0 <= z < -0.5:
        w = z / (z - 1.0)
        return (1.0 - z) ** (-a) * _series(a, c - b, c, w)
    if z < -2.0:
        if float(a - b).is_integer():
            raise DomainError(f"hyp2f1: a-b={a - b} integer; 1/z transformation degenerate")
        g = math.gamma
        zi = 1.0 / z
        t1 = g(c) * g(b - a) / (g(b) * g(c - a)) * (-z) ** (-a) * _series(a, a - c + 1, a - b + 1, zi)
        t2 = g(c) * g(a - b) / (g(a) * g(c - b)) * (-z) ** (-b) * _series(b, b - c + 1, b - a + 1, zi)
        return t1 + t2
    # 0.5 < z < 1
    s = c - a - b
    if float(s).is_integer():
        if z <= 0.9:
            return _series(a, b, c, z)
        raise DomainError(f"hyp2f1: c-a-b={s} integer; 1-z transformation degenerate at z={z}")
    g = math.gamma
    w = 1.0 - z
    t1 = g(c) * g(s) / (g(c - a) * g(c - b)) * _series(a, b, 1.0 - s, w)
    t2 = w ** s * g(c) * g(-s) / (g(a) * g(b)) * _series(c - a, c - b, 1.0 + s, w)
    return t1 + t2
