from typing import Union

import numpy as np

from ..errors import DimensionError
from ..graphs import GraphInstance
from .models import as_spins


def coupling_matrix(g: Union[GraphInstance, np.ndarray]) -> np.ndarray:
    j = g.j_matrix if isinstance(g, GraphInstance) else np.asarray(g, dtype=np.float64)
    if j.ndim != 2 or j.shape[0] != j.shape[1]:
        raise DimensionError(f"coupling matrix must be square, got shape {j.shape}")
    return j


def ising_energy(g: Union[GraphInstance, np.ndarray], spins) -> float:
    """E = -(1/2) sum_ij J_ij s_i s_j"""
    j = coupling_matrix(g)
    s = as_spins(spins, j.shape[0]).astype(np.float64)
    return float(-0.5 * (s @ j @ s))


def ising_energy_edges(g: GraphInstance, spins) -> float:
    """Same energy summed over the edge list, -sum_(i<j) J_ij s_i s_j."""
    s = as_spins(spins, g.n)
    return float(-sum(w * int(s[i]) * int(s[k]) for i, k, w in g.edges()))
