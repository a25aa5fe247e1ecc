"""Reference solvers: Ising energy, exhaustive search, circulant eigenvector, annealing."""
from .models import AnnealSchedule, GroundState, as_spins
from .energy import coupling_matrix, ising_energy, ising_energy_edges
from .brute_force import MAX_SITES, brute_force_ground_state
from .circulant import circulant_ground_state
from .annealing import metropolis_anneal

__all__ = [
    "AnnealSchedule",
    "GroundState",
    "MAX_SITES",
    "as_spins",
    "brute_force_ground_state",
    "circulant_ground_state",
    "coupling_matrix",
    "ising_energy",
    "ising_energy_edges",
    "metropolis_anneal",
]
