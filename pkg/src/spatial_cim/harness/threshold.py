"""Oscillation threshold located by simulation."""
from dataclasses import dataclass

import numpy as np
from loguru import logger

from ..config.schema import PumpConfig, RunConfig
from ..coupling import CouplingOperator, threshold_from_radius
from ..errors import NoThresholdError
from ..machine import FieldState, round_trip

SEED_AMPLITUDE = 1e-6
PUMP_CEILING = 1e6


@dataclass(frozen=True)
class ThresholdBracket:
    rho: float
    r_out: float
    simulated: float
    formula: float
    bisection_steps: int

    @property
    def rel_error(self) -> float:
        if self.formula == 0.0:
            return abs(self.simulated)
        return abs(self.simulated - self.formula) / self.formula

    def to_dict(self) -> dict:
        return {
            "rho": self.rho,
            "r_out": self.r_out,
            "simulated": self.simulated,
            "formula": self.formula,
            "rel_error": self.rel_error,
            "bisection_steps": self.bisection_steps,
        }


def grows(pump: float, op: CouplingOperator, cfg: RunConfig, round_trips: int) -> bool:
    """True when a small real seed amplitude has grown after ``round_trips``."""
    state = FieldState(np.full(op.n_sites, SEED_AMPLITUDE, dtype=np.complex128))
    for _ in range(round_trips):
        state = round_trip(state, op, cfg, pump=pump)
    return float(np.max(np.abs(state.amplitudes))) > SEED_AMPLITUDE


def bracket_threshold(rho: float, cfg: RunConfig, *, round_trips: int = 50,
                      rel_tol: float = 1e-4) -> ThresholdBracket:
    """
    Bisect the pump between decay and growth of a single site with Q = (rho).

    Args:
        rho: the single-site coupling, which is also rho(Q)
        cfg: run configuration (units, r_out and steps_per_pass are used)
        round_trips: round trips simulated per trial pump
        rel_tol: stop once the bracket is narrower than rel_tol * upper end

    Raises:
        NoThresholdError: no growth up to the pump ceiling
    """
    op = CouplingOperator.dense([[rho]], allow_active=True)
    local = cfg.model_copy(update={"trip_noise_amp": 0.0, "pump": PumpConfig(absolute=0.0)})
    formula = threshold_from_radius(rho, cfg.r_out, cfg.units.to_units())

    lo, hi = 0.0, 1.0
    while not grows(hi, op, local, round_trips):
        lo, hi = hi, 2.0 * hi
        if hi > PUMP_CEILING:
            raise NoThresholdError(f"no growth up to pump {PUMP_CEILING:g} for rho={rho}")
    steps = 0
    if grows(lo, op, local, round_trips):
        hi = lo
    while hi - lo > rel_tol * hi:
        mid = 0.5 * (lo + hi)
        if grows(mid, op, local, round_trips):
            hi = mid
        else:
            lo = mid
        steps += 1
    result = ThresholdBracket(rho, cfg.r_out, 0.5 * (lo + hi), formula, steps)
    logger.info(f"[Harness] threshold for rho={rho}, r_out={cfg.r_out:.6g}: simulated "
                f"{result.simulated:.6g}, closed form {formula:.6g} ({result.rel_error:.2e} rel)")
    return result
