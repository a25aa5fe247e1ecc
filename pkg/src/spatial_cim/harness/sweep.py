"""Pump sweeps: the experiment repeated over a grid of threshold multiples."""
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
import pandas as pd
from loguru import logger
from tqdm import tqdm

from ..config.schema import ExperimentSpec, PumpConfig
from ..errors import ConfigError
from ..machine import write_csv
from .experiment import run_experiment

SWEEP_COLUMNS = [
    "pump_multiple",
    "success_fraction",
    "oscillating_fraction",
    "median_settle_round_trip",
    "mean_final_energy",
    "min_final_energy",
    "n_failed",
]


def pump_sweep(spec: ExperimentSpec, pump_grid: Optional[Sequence[float]] = None, *,
               threads: Optional[int] = None, out_dir: Optional[Union[str, Path]] = None,
               progress: bool = False) -> pd.DataFrame:
    """
    Success fraction and median settle round trip per pump multiple.

    Each grid point runs the whole experiment with the pump set to that
    multiple of threshold, writing its files under ``pump_<multiple>/``.
    Energies are NaN where no seed oscillates.
    """
    grid = list(pump_grid if pump_grid is not None else (spec.pump_grid or []))
    if not grid:
        raise ConfigError("pump sweep needs a non-empty pump_grid")
    if any(not (m >= 0.0) for m in grid):
        raise ConfigError(f"pump multiples must be non-negative, got {grid}")
    out = Path(out_dir) if out_dir is not None else spec.output_dir()

    rows = []
    for multiple in tqdm(grid, disable=not progress, desc="pump sweep"):
        point = spec.model_copy(update={
            "run": spec.run.model_copy(update={"pump": PumpConfig(threshold_multiple=multiple)}),
        })
        bundle = run_experiment(point, threads=threads, out_dir=out / f"pump_{multiple:g}")
        agg = bundle.aggregate
        no_oscillation = agg["oscillating_fraction"] == 0.0
        if no_oscillation:
            logger.warning(f"[Harness] pump {multiple:g} x threshold: no seed oscillates")
        rows.append({
            "pump_multiple": multiple,
            "success_fraction": agg["success_fraction"],
            "oscillating_fraction": agg["oscillating_fraction"],
            "median_settle_round_trip": _or_nan(agg["median_settle_round_trip"]),
            "mean_final_energy": np.nan if no_oscillation else _or_nan(agg["mean_final_energy"]),
            "min_final_energy": np.nan if no_oscillation else _or_nan(agg["min_final_energy"]),
            "n_failed": len(bundle.failures),
        })

    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    write_csv(table, out / "sweep.csv", spec.config_hash())
    return table


def _or_nan(value: Optional[float]) -> float:
    return np.nan if value is None else float(value)
