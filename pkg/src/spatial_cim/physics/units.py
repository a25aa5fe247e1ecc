"""Normalized units for the parametric-amplification equations."""
import math
from dataclasses import dataclass
from typing import Optional

from ..errors import ConfigError


@dataclass(frozen=True)
class NormalizedUnits:
    """Scales used to integrate the NLM equations.

    Fields are measured in units of ``a0_volts_per_m`` and the propagation
    coordinate in units of the medium length, so one pass integrates
    z over [0, 1] with the rescaled coupling ``kappa_tilde``. The physical
    constants are carried for reporting only.
    """
    kappa_tilde: float = 0.01
    a0_volts_per_m: Optional[float] = 6.77e3
    l_meters: Optional[float] = 0.1
    chi2: Optional[float] = 1e-11
    lambda_s: Optional[float] = 1.064e-6
    n_refr: Optional[float] = 2.0

    z_span = (0.0, 1.0)

    def __post_init__(self):
        if not (self.kappa_tilde > 0 and math.isfinite(self.kappa_tilde)):
            raise ConfigError(f"kappa_tilde must be a positive finite number, got {self.kappa_tilde}")

    @property
    def kappa(self) -> Optional[float]:
        """Physical coupling 2*pi*chi2 / (lambda_s * n^2) in 1/V, if known."""
        if self.chi2 is None or self.lambda_s is None or self.n_refr is None:
            return None
        return 2.0 * math.pi * self.chi2 / (self.lambda_s * self.n_refr ** 2)

    @property
    def kappa_tilde_physical(self) -> Optional[float]:
        """kappa * L * A0, the value the physical metadata implies."""
        kappa = self.kappa
        if kappa is None or self.l_meters is None or self.a0_volts_per_m is None:
            return None
        return kappa * self.l_meters * self.a0_volts_per_m

    def to_volts_per_m(self, amplitude: float) -> Optional[float]:
        if self.a0_volts_per_m is None:
            return None
        return amplitude * self.a0_volts_per_m

    def describe(self) -> dict:
        return {
            "kappa_tilde": self.kappa_tilde,
            "a0_volts_per_m": self.a0_volts_per_m,
            "l_meters": self.l_meters,
            "chi2": self.chi2,
            "lambda_s": self.lambda_s,
            "n_refr": self.n_refr,
            "kappa_per_volt": self.kappa,
            "kappa_tilde_physical": self.kappa_tilde_physical,
        }
