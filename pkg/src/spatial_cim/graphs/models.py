from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..errors import GraphError


class GraphFamily(str, Enum):
    MOBIUS_LADDER = "ML"
    COMPLETE = "K"
    ERDOS_RENYI = "ER"
    BARABASI_ALBERT = "BA"


class GraphParams(BaseModel):
    """Edge weights and densities; each family reads the fields it needs."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    alpha: float = -0.2       # ML edge weight
    gamma: float = 0.03       # K edge magnitude
    beta: float = 0.05        # ER / BA edge magnitude
    density: float = Field(0.2, gt=0.0, le=1.0)
    attachment: Optional[int] = Field(None, ge=1)   # BA edges per new node


class CouplingAssembly(BaseModel):
    """Weights of Q = a*1 + b*J"""
    model_config = ConfigDict(extra="forbid", frozen=True)

    a: float = Field(0.96, gt=0.0, lt=1.0)
    b: float = Field(0.04, ge=0.0)


Edge = Tuple[int, int, float]


@dataclass(frozen=True, eq=False)
class GraphInstance:
    """Real symmetric coupling matrix J with its family metadata"""
    family: GraphFamily
    n: int
    j_matrix: np.ndarray = field(repr=False)
    params: GraphParams = field(default_factory=GraphParams)
    seed: int = 0
    metadata: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        j = np.array(self.j_matrix, dtype=np.float64, copy=True)
        if j.shape != (self.n, self.n):
            raise GraphError(f"J must be {self.n}x{self.n}, got shape {j.shape}")
        if not np.array_equal(j, j.T):
            raise GraphError("J must be exactly symmetric")
        if np.any(np.diag(j) != 0.0):
            raise GraphError("J must have a zero diagonal")
        j.setflags(write=False)
        object.__setattr__(self, "j_matrix", j)

    def edges(self) -> List[Edge]:
        """Weighted edges (i, j, w) with i < j, in lexicographic order."""
        rows, cols = np.triu_indices(self.n, k=1)
        weights = self.j_matrix[rows, cols]
        present = weights != 0.0
        return [(int(i), int(j), float(w)) for i, j, w in zip(rows[present], cols[present], weights[present])]

    @property
    def edge_count(self) -> int:
        return int(np.count_nonzero(np.triu(self.j_matrix, k=1)))

    @property
    def density(self) -> float:
        pairs = self.n * (self.n - 1) // 2
        return self.edge_count / pairs if pairs else 0.0

    def degrees(self) -> np.ndarray:
        return np.count_nonzero(self.j_matrix, axis=1)

    @property
    def first_row(self) -> np.ndarray:
        return np.array(self.j_matrix[0])

    @property
    def is_circulant(self) -> bool:
        """True when every row is the first row shifted cyclically."""
        c = self.j_matrix[0]
        idx = (np.arange(self.n)[None, :] - np.arange(self.n)[:, None]) % self.n
        return bool(np.array_equal(self.j_matrix, c[idx]))
