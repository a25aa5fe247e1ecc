"""Round-trip map of the coupled OPO network."""
from .models import FieldState, Trajectory, TripRecord
from .machine import init_noise, resolve_pump, round_trip, run, spins_from_field, spins_hash
from .outputs import (
    read_config_hash,
    read_csv,
    read_fields,
    read_json,
    trajectory_summary,
    write_csv,
    write_fields,
    write_json,
    write_quadratures_csv,
    write_trajectory_csv,
)

__all__ = [
    "FieldState",
    "Trajectory",
    "TripRecord",
    "init_noise",
    "read_config_hash",
    "read_csv",
    "read_fields",
    "read_json",
    "resolve_pump",
    "round_trip",
    "run",
    "spins_from_field",
    "spins_hash",
    "trajectory_summary",
    "write_csv",
    "write_fields",
    "write_json",
    "write_quadratures_csv",
    "write_trajectory_csv",
]
