"""Exact travelling waves of reaction-convection-diffusion equations.

Two constructive routes reduce the travelling-wave ODE to an Abel equation
of the first kind: the Chiellini integrability condition (``chiellini``) and
the Lemke transformation (``lemke``). ``oracle`` checks both against direct
ODE shooting and method-of-lines PDE runs.
"""

from .chiellini import detect_k, solve_theorem1, wave_speed_from_k
from .errors import (AbelWaveError, ConfigError, DegenerateError, DomainError,
                     ICSolveError, InstabilityError, IntegrationError, TrackingError)
from .lemke import solve_lemke
from .model import Family, RCDModel, abel_reduce, make_custom_model, make_model
from .oracle import fixed_points, front_speed, pde_evolve, shoot_wave_ode, verify
from .solution import ParametricSolution, Route, WaveProfile

__version__ = "0.1.0"

__all__ = [
    "AbelWaveError", "ConfigError", "DegenerateError", "DomainError", "Family",
    "ICSolveError", "InstabilityError", "IntegrationError", "ParametricSolution",
    "RCDModel", "Route", "TrackingError", "WaveProfile", "abel_reduce", "detect_k",
    "fixed_points", "front_speed", "make_custom_model", "make_model", "pde_evolve",
    "shoot_wave_ode", "solve_lemke", "solve_theorem1", "verify", "wave_speed_from_k",
]
