"""
Trajectory writers.

Every file carries the experiment config hash: CSV files in a leading
``# config_hash=...`` comment line, JSON files in a ``config_hash`` key.
Wall-clock stage timings go to ``stages.json`` only; every other file is
reproduced byte for byte by a rerun.
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from ..errors import ConfigError
from .models import Trajectory

PathLike = Union[str, Path]
FIELDS_DTYPE = "<c8"


def to_jsonable(value: Any) -> Any:
    """Plain-Python copy of nested numpy containers."""
    if isinstance(value, dict):
        return {str(k): to_jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_jsonable(v) for v in value]
    if isinstance(value, np.ndarray):
        return to_jsonable(value.tolist())
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.integer):
        return int(value)
    if isinstance(value, np.floating):
        value = float(value)
    if isinstance(value, float) and not np.isfinite(value):
        return None
    return value


def write_csv(frame: pd.DataFrame, path: PathLike, config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(f"# config_hash={config_hash}\n")
        frame.to_csv(f, index=False, lineterminator="\n")
    return path


def read_csv(path: PathLike) -> pd.DataFrame:
    return pd.read_csv(path, comment="#")


def read_config_hash(path: PathLike) -> Optional[str]:
    with open(path, encoding="utf-8") as f:
        first = f.readline().strip()
    if first.startswith("# config_hash="):
        return first.split("=", 1)[1]
    return None


def write_json(payload: Dict[str, Any], path: PathLike, config_hash: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = {"config_hash": config_hash, **to_jsonable(payload)}
    path.write_text(json.dumps(body, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def read_json(path: PathLike) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read {path}: {e}") from e


def trajectory_summary(traj: Trajectory) -> Dict[str, Any]:
    return {
        "final_energy": traj.final_energy,
        "final_spins": traj.final_spins,
        "converged": traj.converged,
        "oscillating": traj.oscillating,
        "settle_round_trip": traj.settle_round_trip,
        "n_round_trips": traj.n_round_trips,
        **traj.metadata,
    }


def write_trajectory_csv(traj: Trajectory, path: PathLike, config_hash: str) -> Path:
    return write_csv(traj.to_frame(), path, config_hash)


def write_quadratures_csv(traj: Trajectory, path: PathLike, config_hash: str,
                          tau_max: Optional[int] = None) -> Path:
    """Raw (tau, site, re, im) samples up to ``tau_max``."""
    frame = traj.quadrature_frame()
    if tau_max is not None:
        frame = frame[frame["tau"] <= tau_max]
    return write_csv(frame, path, config_hash)


def write_fields(traj: Trajectory, directory: PathLike, config_hash: str,
                 stem: str = "fields") -> Path:
    """
    Field snapshots as one little-endian complex64 array per round trip.

    ``<stem>.bin`` holds the snapshots back to back; ``<stem>.json`` is the
    index (shape, dtype and byte offset of every round trip).
    """
    if traj.snapshots is None:
        raise ConfigError("field snapshots need record_fields='full'")
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    stacked = np.stack(traj.snapshots).astype(FIELDS_DTYPE)
    n_taus, n_sites = stacked.shape
    bin_path = directory / f"{stem}.bin"
    bin_path.write_bytes(stacked.tobytes(order="C"))
    item = np.dtype(FIELDS_DTYPE).itemsize * n_sites
    write_json({
        "file": bin_path.name,
        "dtype": FIELDS_DTYPE,
        "n_sites": n_sites,
        "entries": [{"tau": tau, "offset": tau * item, "count": n_sites} for tau in range(n_taus)],
    }, directory / f"{stem}.json", config_hash)
    return bin_path


def read_fields(index_path: PathLike) -> np.ndarray:
    """(n_taus, n_sites) complex64 array from a snapshot index file."""
    index = read_json(index_path)
    raw = (Path(index_path).parent / index["file"]).read_bytes()
    data = np.frombuffer(raw, dtype=index["dtype"])
    return data.reshape(len(index["entries"]), index["n_sites"])
