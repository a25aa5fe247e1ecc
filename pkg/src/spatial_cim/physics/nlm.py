"""
Degenerate parametric amplification inside the nonlinear medium.

One pass integrates, independently at every site,

    dB/dz = -k A^2        dA/dz = k B conj(A)

over z in [0, 1] with a fixed-step RK4 scheme, where A is the signal, B the
pump and k the rescaled coupling ``kappa_tilde``. ``integrate_fields`` works
on whole arrays of sites at once; ``integrate_pass`` is the single-site form.
The polar form in (u, u_p, theta) is kept only as a cross-check of the
Cartesian integrator.
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from ..errors import ConfigError, IntegrationDivergedError, PolarSingularityError
from .units import NormalizedUnits

DEFAULT_STEPS = 100

# Below this pump magnitude the 1/u_p term of the polar equations is not trusted.
POLAR_CUTOFF = 1e-12


@dataclass(frozen=True)
class SitePair:
    """Signal and pump amplitude at one site, in units of A0"""
    signal: complex
    pump: complex

    def __post_init__(self):
        object.__setattr__(self, "signal", complex(self.signal))
        object.__setattr__(self, "pump", complex(self.pump))
        if not (_finite(self.signal) and _finite(self.pump)):
            raise ConfigError(f"site state must be finite, got signal={self.signal}, pump={self.pump}")

    @property
    def power(self) -> float:
        """|A|^2 + |B|^2, conserved along the medium."""
        return abs(self.signal) ** 2 + abs(self.pump) ** 2


@dataclass(frozen=True)
class PolarState:
    """Signal magnitude, pump magnitude and relative phase theta = phi_p - 2 phi"""
    u: float
    u_p: float
    theta: float

    def __post_init__(self):
        if self.u < 0 or self.u_p < 0:
            raise ConfigError(f"magnitudes must be non-negative, got u={self.u}, u_p={self.u_p}")
        object.__setattr__(self, "theta", wrap_phase(self.theta))


def _finite(z: complex) -> bool:
    return math.isfinite(z.real) and math.isfinite(z.imag)


def wrap_phase(theta: float) -> float:
    """Reduce an angle to (-pi, pi]."""
    return math.pi - (math.pi - float(theta)) % (2.0 * math.pi)


def _check_steps(steps: int) -> None:
    if int(steps) != steps or steps < 1:
        raise ConfigError(f"steps must be a positive integer, got {steps}")


def _rhs(a: np.ndarray, b: np.ndarray, k: float) -> Tuple[np.ndarray, np.ndarray]:
    return k * b * np.conj(a), -k * a * a


def integrate_fields(signal, pump, kappa_tilde: float,
                     steps: int = DEFAULT_STEPS) -> Tuple[np.ndarray, np.ndarray]:
    """
    Integrate one pass for an array of sites.

    Args:
        signal: complex signal amplitudes, any shape
        pump: complex pump amplitude(s) broadcastable to ``signal``
        kappa_tilde: rescaled nonlinear coupling
        steps: number of RK4 steps over z in [0, 1]

    Returns:
        (signal, pump) at z = 1, as new complex128 arrays

    Raises:
        IntegrationDivergedError: a non-finite value appears; ``step`` is the
            step index (0 for non-finite input) and ``sites`` the flat indices
    """
    _check_steps(steps)
    a = np.array(signal, dtype=np.complex128, copy=True)
    b = np.array(np.broadcast_to(np.asarray(pump, dtype=np.complex128), a.shape))
    _check_finite(a, b, 0)

    k = float(kappa_tilde)
    h = 1.0 / steps
    half = 0.5 * h
    sixth = h / 6.0
    for step in range(1, steps + 1):
        k1a, k1b = _rhs(a, b, k)
        k2a, k2b = _rhs(a + half * k1a, b + half * k1b, k)
        k3a, k3b = _rhs(a + half * k2a, b + half * k2b, k)
        k4a, k4b = _rhs(a + h * k3a, b + h * k3b, k)
        a = a + sixth * (k1a + 2.0 * k2a + 2.0 * k3a + k4a)
        b = b + sixth * (k1b + 2.0 * k2b + 2.0 * k3b + k4b)
        _check_finite(a, b, step)
    return a, b


def _check_finite(a: np.ndarray, b: np.ndarray, step: int) -> None:
    ok = np.isfinite(a) & np.isfinite(b)
    if not ok.all():
        raise IntegrationDivergedError(step, np.flatnonzero(~ok).tolist())


def integrate_pass(state: SitePair, units: NormalizedUnits,
                   steps: int = DEFAULT_STEPS) -> SitePair:
    """Integrate one pass through the medium for a single site."""
    a, b = integrate_fields(state.signal, state.pump, units.kappa_tilde, steps)
    return SitePair(complex(a), complex(b))


def _polar_rhs(y: np.ndarray, k: float, step: int) -> np.ndarray:
    u, u_p, theta = y
    if u_p < POLAR_CUTOFF:
        raise PolarSingularityError(step, float(u_p))
    c, s = math.cos(theta), math.sin(theta)
    return np.array([
        k * u * u_p * c,
        -k * u * u * c,
        k * s * (u * u - 2.0 * u_p * u_p) / u_p,
    ])


def integrate_pass_polar(state: PolarState, units: NormalizedUnits,
                         steps: int = DEFAULT_STEPS) -> PolarState:
    """
    Integrate one pass of the polar equations with the same RK4 stepper.

    Raises:
        PolarSingularityError: the pump magnitude drops below POLAR_CUTOFF
    """
    _check_steps(steps)
    k = units.kappa_tilde
    h = 1.0 / steps
    y = np.array([state.u, state.u_p, state.theta], dtype=np.float64)
    for step in range(1, steps + 1):
        k1 = _polar_rhs(y, k, step)
        k2 = _polar_rhs(y + 0.5 * h * k1, k, step)
        k3 = _polar_rhs(y + 0.5 * h * k2, k, step)
        k4 = _polar_rhs(y + h * k3, k, step)
        y = y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
    # u can only reach tiny negative values through rounding when it starts at 0
    return PolarState(max(float(y[0]), 0.0), max(float(y[1]), 0.0), float(y[2]))


def to_polar(state: SitePair) -> PolarState:
    u = abs(state.signal)
    u_p = abs(state.pump)
    theta = np.angle(state.pump) - 2.0 * np.angle(state.signal)
    return PolarState(u, u_p, float(theta))


def from_polar(state: PolarState, pump_phase: float = 0.0) -> SitePair:
    """Cartesian state with the given pump phase (0 = real pump)."""
    phi = 0.5 * (pump_phase - state.theta)
    return SitePair(state.u * complex(math.cos(phi), math.sin(phi)),
                    state.u_p * complex(math.cos(pump_phase), math.sin(pump_phase)))
