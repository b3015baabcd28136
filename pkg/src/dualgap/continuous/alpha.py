"""Rate functions alpha(t) for the continuous-time dynamics."""
from dataclasses import dataclass

from dualgap.errors import ConfigError

ALPHA_FAMILIES = ("linear", "polynomial")


@dataclass(frozen=True)
class AlphaSpec:
    """alpha(t) = alpha0 + rate*t, or alpha0 (1 + t)^power.

    Both families have alpha(0) = alpha0 > 0 and a positive derivative.
    """

    family: str = "linear"
    alpha0: float = 1.0
    rate: float = 1.0
    power: float = 2.0

    def __post_init__(self):
        if self.family not in ALPHA_FAMILIES:
            raise ConfigError(f"Unknown alpha family '{self.family}', expected one of {ALPHA_FAMILIES}")
        if self.alpha0 <= 0:
            raise ConfigError(f"alpha0 must be positive, got {self.alpha0}")
        if self.family == "linear" and self.rate <= 0:
            raise ConfigError(f"Linear alpha needs a positive rate, got {self.rate}")
        if self.family == "polynomial" and self.power <= 0:
            raise ConfigError(f"Polynomial alpha needs a positive power, got {self.power}")

    def value(self, t: float) -> float:
        if self.family == "linear":
            return self.alpha0 + self.rate * t
        return self.alpha0 * (1.0 + t) ** self.power

    def derivative(self, t: float) -> float:
        if self.family == "linear":
            return self.rate
        return self.alpha0 * self.power * (1.0 + t) ** (self.power - 1.0)

    def A(self, t: float) -> float:
        """alpha(t) - alpha(0), the mass the integrals see."""
        return self.value(t) - self.alpha0
