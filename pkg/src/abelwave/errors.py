"""Exception hierarchy shared by every module."""


class AbelWaveError(Exception):
    """Base class for all package errors."""


class ConfigError(AbelWaveError, ValueError):
    """Invalid or incomplete user configuration (missing field, unknown key)."""


class DomainError(AbelWaveError, ValueError):
    """Evaluation outside the mathematical domain of a formula or model."""


class DegenerateError(DomainError):
    """A quantity that must be nonzero vanished (f = V_f + B, u', ...)."""


class BracketError(AbelWaveError, ValueError):
    """Root bracket without a sign change."""


class InversionError(AbelWaveError):
    """u(theta) could not be recovered from the first integral."""


class ConvergenceError(AbelWaveError, RuntimeError):
    """Iteration cap hit. Carries the best estimate and its error bound."""

    def __init__(self, message, estimate=None, error=None):
        super().__init__(message)
        self.estimate = estimate
        self.error = error


class IntegrationError(AbelWaveError, RuntimeError):
    """ODE step size underflow. ``t_last`` is the last accepted time."""

    def __init__(self, message, t_last=None, trajectory=None):
        super().__init__(message)
        self.t_last = t_last
        self.trajectory = trajectory


class InstabilityError(AbelWaveError, RuntimeError):
    """PDE blow-up. ``last_state`` is the last state that passed the bound check."""

    def __init__(self, message, last_state=None):
        super().__init__(message)
        self.last_state = last_state


class TrackingError(AbelWaveError, ValueError):
    """Level crossing missing or ambiguous during front tracking."""


class SingularityError(DomainError):
    """Evaluation at a singular point of a parametrization (e.g. a root of theta^2 + theta + k)."""


class ICSolveError(AbelWaveError, ValueError):
    """No integration constants reproduce the requested initial data."""
