import math

import numpy as np
import pytest

from spatial_cim.config import PumpConfig, RunConfig
from spatial_cim.graphs import CouplingAssembly, GraphFamily, make_graph

R_OUT = math.sqrt(0.9)


@pytest.fixture(autouse=True)
def _isolated_output_dir(tmp_path, monkeypatch):
    monkeypatch.setenv("SPATIAL_CIM_OUTPUT_DIR", str(tmp_path / "runs"))
    monkeypatch.setenv("SPATIAL_CIM_THREADS", "1")


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def assembly():
    return CouplingAssembly()


@pytest.fixture
def ml8():
    return make_graph(GraphFamily.MOBIUS_LADDER, 8)


@pytest.fixture
def ml112():
    return make_graph(GraphFamily.MOBIUS_LADDER, 112)


@pytest.fixture
def fast_run():
    """Published physics with a coarser (still RK4-accurate) pass for quick runs."""
    return RunConfig(pump=PumpConfig(threshold_multiple=1.2), n_round_trips=300,
                     steps_per_pass=20, record_fields="stats")


@pytest.fixture
def ml_experiment():
    """Factory for experiment payloads on a small Mobius ladder."""
    def build(name="ml8", n=8, seeds=(0, 1), **run):
        run_cfg = {"n_round_trips": 200, "steps_per_pass": 20, "record_fields": "stats"}
        run_cfg.update(run)
        return {
            "schema_version": 1,
            "name": name,
            "graph": {"family": "ML", "n": n},
            "run": run_cfg,
            "seeds": list(seeds),
        }
    return build
