import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
import pandas as pd

from ..errors import ConfigError

TRAJECTORY_COLUMNS = ["tau", "ising_energy", "mean_abs_re", "mean_abs_im", "max_abs", "spins_changed"]


@dataclass(frozen=True, eq=False)
class FieldState:
    """OPO amplitudes (units of A0) at round trip ``round_trip``"""
    amplitudes: np.ndarray
    round_trip: int = 0

    def __post_init__(self):
        a = np.array(self.amplitudes, dtype=np.complex128, copy=True)
        if a.ndim != 1:
            raise ConfigError(f"field must be one-dimensional, got shape {a.shape}")
        if not np.isfinite(a).all():
            raise ConfigError(f"field at round trip {self.round_trip} has non-finite amplitudes")
        if self.round_trip < 0:
            raise ConfigError(f"round trip index must be non-negative, got {self.round_trip}")
        a.setflags(write=False)
        object.__setattr__(self, "amplitudes", a)

    @property
    def n_sites(self) -> int:
        return self.amplitudes.shape[0]


@dataclass(frozen=True)
class TripRecord:
    tau: int
    ising_energy: float
    mean_abs_re: float
    mean_abs_im: float
    max_abs: float
    spins_hash: str
    spins_changed: int


@dataclass
class Trajectory:
    """Per-round-trip records of one run, from tau = 0 to the budget"""
    records: List[TripRecord]
    final_spins: np.ndarray
    final_amplitudes: np.ndarray
    snapshots: Optional[List[np.ndarray]] = None
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def n_round_trips(self) -> int:
        return len(self.records) - 1

    @property
    def final_energy(self) -> float:
        return self.records[-1].ising_energy

    @property
    def energies(self) -> np.ndarray:
        return np.array([r.ising_energy for r in self.records])

    @property
    def oscillating(self) -> bool:
        """Field grew above its initial noise level."""
        return self.records[-1].max_abs > self.records[0].max_abs

    def convergence_window(self) -> int:
        return max(1, math.ceil(0.1 * self.n_round_trips))

    @property
    def converged(self) -> bool:
        """Spin configuration unchanged over the last 10% of the budget."""
        tail = self.records[-(self.convergence_window() + 1):]
        return len({r.spins_hash for r in tail}) == 1

    @property
    def settle_round_trip(self) -> int:
        """First tau from which the spin configuration never changes again."""
        for record in reversed(self.records):
            if record.spins_changed:
                return record.tau
        return 0

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[r.tau, r.ising_energy, r.mean_abs_re, r.mean_abs_im, r.max_abs, r.spins_changed]
             for r in self.records],
            columns=TRAJECTORY_COLUMNS,
        )

    def quadrature_frame(self) -> pd.DataFrame:
        """Raw (tau, site, re, im) samples; needs full snapshots."""
        if self.snapshots is None:
            raise ConfigError("quadrature samples need record_fields='full'")
        stacked = np.stack(self.snapshots)
        taus, sites = np.indices(stacked.shape)
        return pd.DataFrame({
            "tau": taus.ravel(),
            "site": sites.ravel(),
            "re": stacked.real.ravel(),
            "im": stacked.imag.ravel(),
        })
