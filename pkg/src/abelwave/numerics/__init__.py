"""Self-contained numerical kernels: quadrature, roots, ODEs, special functions."""

from .differentiate import derivative, second_derivative
from .ode import Trajectory, integrate_ode
from .quadrature import quad
from .roots import find_root
from .special import erf, hyp2f1
from .tolerance import DEFAULT_TOL, Tolerance

__all__ = [
    "DEFAULT_TOL", "Tolerance", "Trajectory", "derivative", "erf", "find_root",
    "hyp2f1", "integrate_ode", "quad", "second_derivative",
]
