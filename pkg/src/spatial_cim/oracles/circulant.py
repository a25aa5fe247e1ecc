import numpy as np
import scipy.fft

from ..errors import GraphError
from ..graphs import GraphInstance
from .energy import ising_energy
from .models import GroundState

# relative tolerance when picking among (numerically) degenerate eigenvalues
EIG_TIE_TOL = 1e-12
# eigenvector components below this fraction of the largest count as zero
ZERO_TOL = 1e-9


def circulant_ground_state(g: GraphInstance) -> GroundState:
    """
    Spin readout of the top eigenvector of a circulant J.

    The eigenvalues lambda_k = sum_j c_j w^(jk) follow from the first row c.
    The smallest k reaching the maximum is used with the real eigenvector
    cos(2 pi k j / N); if that vector has zero components the lattice offset
    moves by half a site. The result also carries the spectral bound
    -(N/2) lambda_max and whether the sign readout attains it.

    Raises:
        GraphError: J is not circulant
    """
    if not g.is_circulant:
        raise GraphError(f"{g.family.value} graph with n={g.n} is not circulant")
    n = g.n
    eigenvalues = scipy.fft.fft(g.first_row).real
    lam_max = float(eigenvalues.max())
    tie = EIG_TIE_TOL * max(1.0, abs(lam_max))
    mode = int(np.flatnonzero(eigenvalues >= lam_max - tie)[0])

    sites = np.arange(n)
    offset = 0.0
    vector = np.cos(2.0 * np.pi * mode * sites / n)
    if np.min(np.abs(vector)) < ZERO_TOL:
        offset = 0.5
        vector = np.cos(2.0 * np.pi * mode * (sites + offset) / n)
    spins = np.where(vector < -ZERO_TOL, -1, 1).astype(np.int8)

    energy = ising_energy(g, spins)
    bound = -0.5 * n * lam_max
    attained = abs(energy - bound) <= 1e-9 * max(1.0, abs(bound))
    return GroundState(spins, energy, "circulant-eigenvector", {
        "eigenvalue_max": lam_max,
        "mode": mode,
        "offset": offset,
        "spectral_bound": bound,
        "bound_attained": bool(attained),
    })
