from typing import Union

import numpy as np

from ..errors import ConfigError
from ..graphs import GraphInstance
from .energy import coupling_matrix, ising_energy
from .models import GroundState

MAX_SITES = 24
_CHUNK = 1 << 16


def _decode(indices: np.ndarray, n: int) -> np.ndarray:
    """Spin rows for configuration indices; the last spin is pinned to +1."""
    free = n - 1
    bits = (indices[:, None] >> np.arange(free, dtype=np.int64)[None, :]) & 1
    spins = np.ones((indices.size, n))
    spins[:, :free] = 1.0 - 2.0 * bits
    return spins


def brute_force_ground_state(g: Union[GraphInstance, np.ndarray]) -> GroundState:
    """
    Exhaustive ground state search.

    Global spin flip leaves the energy unchanged, so only the 2^(N-1)
    configurations with the last spin up are enumerated. The first minimizer
    in enumeration order is returned.

    Raises:
        ConfigError: more than MAX_SITES sites
    """
    j = coupling_matrix(g)
    n = j.shape[0]
    if n > MAX_SITES:
        raise ConfigError(f"brute force is limited to N <= {MAX_SITES}, got N={n}")
    if n == 0:
        raise ConfigError("graph has no sites")

    total = 1 << (n - 1)
    best_energy = np.inf
    best_index = 0
    for start in range(0, total, _CHUNK):
        idx = np.arange(start, min(start + _CHUNK, total), dtype=np.int64)
        s = _decode(idx, n)
        energies = -0.5 * np.einsum("ki,ki->k", s @ j, s)
        k = int(np.argmin(energies))
        if energies[k] < best_energy:
            best_energy = float(energies[k])
            best_index = int(idx[k])

    spins = _decode(np.array([best_index], dtype=np.int64), n)[0].astype(np.int8)
    return GroundState(spins, ising_energy(j, spins), "brute-force", {"configurations": total})
