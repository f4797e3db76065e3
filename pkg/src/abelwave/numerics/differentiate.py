"""Richardson-extrapolated central differences."""

from typing import Callable


def derivative(f: Callable[[float], float], x: float, h: float) -> float:
    """First derivative of ``f`` at ``x``; truncation error O(h**4).

    Combines central differences with steps ``h`` and ``h/2``. Callers pick
    ``h`` so that ``[x - h, x + h]`` stays inside the domain of ``f``.
    """
    d1 = (f(x + h) - f(x - h)) / (2.0 * h)
    h2 = 0.5 * h
    d2 = (f(x + h2) - f(x - h2)) / (2.0 * h2)
    return (4.0 * d2 - d1) / 3.0


def second_derivative(f: Callable[[float], float], x: float, h: float) -> float:
    """Second derivative with the same step-halving extrapolation."""
    f0 = f(x)
    d1 = (f(x + h) - 2.0 * f0 + f(x - h)) / (h * h)
    h2 = 0.5 * h
    d2 = (f(x + h2) - 2.0 * f0 + f(x - h2)) / (h2 * h2)
    return (4.0 * d2 - d1) / 3.0
