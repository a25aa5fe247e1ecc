"""Recount an experiment's aggregate from the per-seed summaries on disk."""
from pathlib import Path
from typing import Any, Dict, Union

from loguru import logger

from ..errors import ConfigError
from ..machine import read_json
from .experiment import seed_stem
from .models import aggregate, is_success


def recompute_report(directory: Union[str, Path]) -> Dict[str, Any]:
    """
    Rebuild the aggregate of ``report.json`` from ``seed_*.json``.

    Success is re-derived from each seed's final energy and the oracle
    energy, not copied from the stored flag.
    """
    directory = Path(directory)
    report_path = directory / "report.json"
    if not report_path.is_file():
        raise ConfigError(f"no report.json in {directory}")
    report = read_json(report_path)
    oracle_energy = report["oracle"]["energy"]
    seeds = [s["seed"] for s in report["seeds"]] + [f["seed"] for f in report["failures"]]

    summaries = []
    for seed in seeds:
        path = directory / f"{seed_stem(seed)}.json"
        if not path.is_file():
            continue
        summary = read_json(path)
        summaries.append({
            "seed": seed,
            "final_energy": summary["final_energy"],
            "oscillating": summary["oscillating"],
            "settle_round_trip": summary["settle_round_trip"],
            "success": is_success(summary["final_energy"], summary["oscillating"], oracle_energy),
        })

    recomputed = aggregate(summaries, len(seeds))
    consistent = recomputed == report["aggregate"]
    if not consistent:
        logger.warning(f"[Harness] aggregate in {report_path} differs from the per-seed recount")
    return {
        "name": report["name"],
        "config_hash": report["config_hash"],
        "stored": report["aggregate"],
        "recomputed": recomputed,
        "consistent": consistent,
    }
