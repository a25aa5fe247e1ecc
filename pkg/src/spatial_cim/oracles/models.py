from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from ..errors import ConfigError, DimensionError


def as_spins(spins, n: Optional[int] = None) -> np.ndarray:
    """Validate a +-1 configuration and return it as an int8 array."""
    s = np.asarray(spins)
    if s.ndim != 1:
        raise DimensionError(f"spin configuration must be one-dimensional, got shape {s.shape}")
    if n is not None and s.shape[0] != n:
        raise DimensionError(f"spin configuration has {s.shape[0]} entries, graph has {n} sites")
    if not np.all((s == 1) | (s == -1)):
        raise ConfigError("spin entries must be +1 or -1")
    return s.astype(np.int8)


@dataclass(frozen=True, eq=False)
class GroundState:
    """Configuration returned by a reference solver"""
    spins: np.ndarray
    energy: float
    method: str
    details: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "method": self.method,
            "energy": self.energy,
            "spins": [int(s) for s in self.spins],
            **self.details,
        }


class AnnealSchedule(BaseModel):
    """
    Geometric cooling schedule for Metropolis annealing.

    Unset temperatures resolve per graph: t_start = 2 * max_i sum_j |J_ij|,
    t_end = t_end_ratio * t_start.
    """
    model_config = ConfigDict(extra="forbid", frozen=True)

    sweeps: int = Field(2000, ge=1)
    restarts: int = Field(20, ge=1)
    t_start: Optional[float] = Field(None, gt=0.0)
    t_end: Optional[float] = Field(None, gt=0.0)
    t_end_ratio: float = Field(1e-3, gt=0.0, lt=1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if self.t_start is not None and self.t_end is not None and not self.t_start > self.t_end:
            raise ValueError(f"t_start ({self.t_start}) must exceed t_end ({self.t_end})")
        return self

    def temperatures(self, j_matrix: np.ndarray) -> Tuple[float, float, float]:
        """(t_start, t_end, cooling factor per sweep) for this coupling matrix."""
        t_start = self.t_start
        if t_start is None:
            t_start = 2.0 * float(np.max(np.abs(j_matrix).sum(axis=1))) if j_matrix.size else 0.0
            if t_start == 0.0:
                t_start = 1.0
        t_end = self.t_end if self.t_end is not None else self.t_end_ratio * t_start
        if not t_start > t_end > 0.0:
            raise ConfigError(f"schedule needs t_start > t_end > 0, got {t_start} and {t_end}")
        cooling = (t_end / t_start) ** (1.0 / (self.sweeps - 1)) if self.sweeps > 1 else 1.0
        return t_start, t_end, cooling
