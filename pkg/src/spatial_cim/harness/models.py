from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import scipy.constants

from ..config.schema import RunConfig
from ..machine import Trajectory

# final energies within this of the oracle count as reaching it
SUCCESS_TOL = 1e-9


@dataclass(frozen=True)
class SeedFailure:
    """A seed that stopped with an error; the rest of the experiment continues"""
    seed: int
    stage: str
    message: str
    kind: str = "numerical"

    def to_dict(self) -> Dict[str, Any]:
        return {"seed": self.seed, "stage": self.stage, "message": self.message, "kind": self.kind}


@dataclass(frozen=True)
class SeedResult:
    seed: int
    final_energy: float
    oscillating: bool
    converged: bool
    settle_round_trip: int
    success: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "seed": self.seed,
            "final_energy": self.final_energy,
            "oscillating": self.oscillating,
            "converged": self.converged,
            "settle_round_trip": self.settle_round_trip,
            "success": self.success,
        }


def is_success(final_energy: float, oscillating: bool, oracle_energy: Optional[float]) -> bool:
    """The machine oscillates and its readout reaches the reference energy."""
    if oracle_energy is None or not oscillating:
        return False
    return final_energy <= oracle_energy + SUCCESS_TOL


def aggregate(summaries: List[Dict[str, Any]], n_seeds: int) -> Dict[str, Any]:
    """
    Success fraction and median settle round trip from per-seed summaries.

    Seeds that failed count against the success fraction and are left out of
    the median.
    """
    successes = sum(1 for s in summaries if s.get("success"))
    settles = [s["settle_round_trip"] for s in summaries if s.get("oscillating")]
    energies = [s["final_energy"] for s in summaries if s.get("oscillating")]
    return {
        "n_seeds": n_seeds,
        "n_completed": len(summaries),
        "n_success": successes,
        "success_fraction": successes / n_seeds if n_seeds else 0.0,
        "oscillating_fraction": len(settles) / n_seeds if n_seeds else 0.0,
        "median_settle_round_trip": float(np.median(settles)) if settles else None,
        "mean_final_energy": float(np.mean(energies)) if energies else None,
        "min_final_energy": float(np.min(energies)) if energies else None,
    }


def hardware_time(cfg: RunConfig) -> Dict[str, Any]:
    """Round-trip time 2 n D / c of a cavity of length D; an estimate, never simulated."""
    tau_rt = 2.0 * cfg.cavity_n_refr * cfg.cavity_length_m / scipy.constants.c
    return {
        "estimate": True,
        "cavity_length_m": cfg.cavity_length_m,
        "cavity_n_refr": cfg.cavity_n_refr,
        "round_trip_s": tau_rt,
        "n_round_trips": cfg.n_round_trips,
        "total_s": cfg.n_round_trips * tau_rt,
    }


@dataclass
class ReportBundle:
    name: str
    config_hash: str
    oracle: Dict[str, Any]
    results: List[SeedResult]
    failures: List[SeedFailure]
    aggregate: Dict[str, Any]
    hardware_time: Dict[str, Any]
    physical: Dict[str, Any]
    trajectories: Dict[int, Trajectory] = field(default_factory=dict, repr=False)
    threshold_check: Optional[Dict[str, Any]] = None
    stage_stats: Dict[str, Any] = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_dict(self) -> Dict[str, Any]:
        payload = {
            "name": self.name,
            "oracle": self.oracle,
            "seeds": [r.to_dict() for r in self.results],
            "failures": [f.to_dict() for f in self.failures],
            "aggregate": self.aggregate,
            "hardware_time": self.hardware_time,
            "physical": self.physical,
        }
        if self.threshold_check is not None:
            payload["threshold_check"] = self.threshold_check
        return payload
