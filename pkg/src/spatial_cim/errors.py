"""
Exception hierarchy for the spatial CIM simulator.

Config-type errors map to CLI exit code 2, numerical errors to exit code 3.
"""
from typing import Optional, Sequence


class SpatialCIMError(Exception):
    """Base class for every error raised by spatial_cim"""


class ConfigError(SpatialCIMError, ValueError):
    """Invalid configuration, parameter or input file"""


class DimensionError(SpatialCIMError, ValueError):
    """Array sizes that should agree do not"""


class GraphError(ConfigError):
    """Invalid graph family parameters or graph file"""


class PassivityError(ConfigError):
    """Coupling operator with spectral radius >= 1 built without override"""

    def __init__(self, rho: float):
        super().__init__(f"coupling operator is not passive: rho(Q) = {rho:.12g} >= 1")
        self.rho = rho


class NumericalError(SpatialCIMError, RuntimeError):
    """Failure of a numerical procedure"""


class IntegrationDivergedError(NumericalError):
    """Non-finite value produced while integrating the parametric equations"""

    def __init__(self, step: int, sites: Optional[Sequence[int]] = None,
                 round_trip: Optional[int] = None):
        self.step = step
        self.sites = list(sites) if sites is not None else None
        self.round_trip = round_trip
        where = f"step {step}"
        if self.sites:
            where += f", site {self.sites[0]}"
            if len(self.sites) > 1:
                where += f" (+{len(self.sites) - 1} more)"
        if round_trip is not None:
            where += f", round trip {round_trip}"
        super().__init__(f"integration diverged at {where}")

    def at_round_trip(self, round_trip: int) -> "IntegrationDivergedError":
        """Copy of this error tagged with the round trip it happened in"""
        return IntegrationDivergedError(self.step, self.sites, round_trip)


class PolarSingularityError(NumericalError):
    """Pump magnitude collapsed where the polar equations are singular"""

    def __init__(self, step: int, u_p: float):
        super().__init__(f"pump magnitude {u_p:.3e} below polar cutoff at step {step}")
        self.step = step
        self.u_p = u_p


class ConvergenceError(NumericalError):
    """Iterative method did not converge within its iteration budget"""


class NoThresholdError(NumericalError):
    """Cavity has linear round-trip gain >= 1 at zero pump"""


class EnergyBookkeepingError(NumericalError):
    """Incrementally tracked energy drifted from the recomputed energy"""
