from dataclasses import dataclass

from ..errors import ConfigError


@dataclass(frozen=True)
class Tolerance:
    """Accuracy request shared by the numerical kernels.

    ``max_iter`` caps root-finder iterations, quadrature subdivisions and
    ODE steps alike.
    """

    rel: float = 1e-10
    abs: float = 1e-13
    max_iter: int = 2000

    def __post_init__(self):
        if not self.rel > 0:
            raise ConfigError(f"Tolerance.rel must be > 0, got {self.rel}")
        if not self.abs >= 0:
            raise ConfigError(f"Tolerance.abs must be >= 0, got {self.abs}")
        if self.max_iter <= 0:
            raise ConfigError(f"Tolerance.max_iter must be positive, got {self.max_iter}")

    def scaled(self, factor: float) -> "Tolerance":
        return Tolerance(self.rel * factor, self.abs * factor, self.max_iter)


DEFAULT_TOL = Tolerance()
