"""
Experiment file schema.

Experiment files are JSON documents validated by these models. Unknown keys
are rejected and every file carries ``schema_version``.
"""
import hashlib
import json
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from ..errors import ConfigError
from ..graphs.models import CouplingAssembly, GraphFamily, GraphParams
from ..oracles.models import AnnealSchedule
from ..physics.units import NormalizedUnits
from .env_config import EnvConfig

SCHEMA_VERSION = 1

PresetName = Literal["fig2-quadratures", "fig3-energy", "pump-sweep", "threshold-check"]
RecordFields = Literal["none", "stats", "full"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)


class UnitsConfig(_Strict):
    kappa_tilde: float = Field(0.01, gt=0.0)
    a0_volts_per_m: Optional[float] = Field(6.77e3, gt=0.0)
    l_meters: Optional[float] = Field(0.1, gt=0.0)
    chi2: Optional[float] = 1e-11
    lambda_s: Optional[float] = Field(1.064e-6, gt=0.0)
    n_refr: Optional[float] = Field(2.0, gt=0.0)

    def to_units(self) -> NormalizedUnits:
        return NormalizedUnits(**self.model_dump())


class PumpConfig(_Strict):
    """Pump amplitude at the medium entrance; exactly one form is given."""
    absolute: Optional[float] = Field(None, ge=0.0)
    threshold_multiple: Optional[float] = Field(None, ge=0.0)
    table: bool = False

    @model_validator(mode="after")
    def _one_form(self):
        given = [self.absolute is not None, self.threshold_multiple is not None, self.table]
        if sum(given) != 1:
            raise ValueError("pump needs exactly one of 'absolute', 'threshold_multiple' or 'table': true")
        return self


class RunConfig(_Strict):
    units: UnitsConfig = UnitsConfig()
    pump: PumpConfig = PumpConfig(threshold_multiple=1.2)
    r_out: float = Field(math.sqrt(0.9), gt=0.0, le=1.0)
    noise_amp: float = Field(1e-3, gt=0.0)
    n_round_trips: int = Field(2000, ge=1)
    seed: int = Field(0, ge=0)
    record_fields: RecordFields = "stats"
    steps_per_pass: int = Field(100, ge=1)
    # per-round-trip noise, off unless a study asks for it
    trip_noise_amp: float = Field(0.0, ge=0.0)
    cavity_length_m: float = Field(1.0, gt=0.0)
    cavity_n_refr: float = Field(2.0, gt=0.0)


class GraphSpec(_Strict):
    family: GraphFamily
    n: int = Field(ge=2)
    seed: int = Field(0, ge=0)
    params: GraphParams = GraphParams()


class OutputConfig(_Strict):
    directory: Optional[str] = None
    formats: List[Literal["csv", "json", "fields", "quadratures"]] = ["csv", "json"]


class ExperimentSpec(_Strict):
    schema_version: Literal[1] = SCHEMA_VERSION
    name: str = Field(pattern=r"^[A-Za-z0-9_.-]+$")
    graph: Optional[GraphSpec] = None
    graph_file: Optional[str] = None
    assembly: CouplingAssembly = CouplingAssembly()
    allow_active_coupling: bool = False
    run: RunConfig = RunConfig()
    seeds: List[int] = Field(min_length=1)
    anneal: AnnealSchedule = AnnealSchedule()
    anneal_seed: int = Field(0, ge=0)
    pump_grid: Optional[List[float]] = None
    preset: Optional[PresetName] = None
    outputs: OutputConfig = OutputConfig()

    @field_validator("seeds")
    @classmethod
    def _seeds_valid(cls, seeds: List[int]) -> List[int]:
        if any(s < 0 for s in seeds):
            raise ValueError("seeds must be non-negative")
        if len(set(seeds)) != len(seeds):
            raise ValueError("seeds must be distinct")
        return seeds

    @field_validator("pump_grid")
    @classmethod
    def _grid_valid(cls, grid: Optional[List[float]]) -> Optional[List[float]]:
        if grid is not None and (not grid or any(not (g >= 0.0) for g in grid)):
            raise ValueError("pump_grid must be a non-empty list of non-negative multiples")
        return grid

    @model_validator(mode="after")
    def _graph_source(self):
        if (self.graph is None) == (self.graph_file is None):
            raise ValueError("give exactly one of 'graph' or 'graph_file'")
        if self.graph_file is not None and not Path(self.graph_file).is_file():
            raise ValueError(f"graph file {self.graph_file} does not exist")
        return self

    def output_dir(self) -> Path:
        if self.outputs.directory:
            return Path(self.outputs.directory)
        return Path(EnvConfig.get_output_dir()) / self.name

    def config_hash(self) -> str:
        """Hash of everything that affects results (output location excluded)."""
        payload = self.model_dump(mode="json", exclude={"outputs"})
        blob = json.dumps(payload, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


@lru_cache(maxsize=None)
def _load_presets(path: str) -> Dict[str, Any]:
    try:
        return json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read presets file {path}: {e}") from e


def load_presets() -> Dict[str, Any]:
    return _load_presets(EnvConfig.get_presets_path())


def table_pump_multiple(family: Union[GraphFamily, str], n: int) -> float:
    """Published pump multiple of threshold for a family and size."""
    family = GraphFamily(family)
    table = load_presets()["pump_table"]
    try:
        return float(table[family.value][str(n)])
    except KeyError as e:
        raise ConfigError(f"no tabulated pump for {family.value} with n={n}") from e


def apply_preset(spec: ExperimentSpec) -> ExperimentSpec:
    """Fill fields the file left unset from the preset recipe."""
    if spec.preset is None:
        return spec
    recipe = load_presets()["presets"].get(spec.preset, {})
    run_updates = {k: v for k, v in recipe.get("run", {}).items() if k not in spec.run.model_fields_set}
    updates: Dict[str, Any] = {}
    if run_updates:
        updates["run"] = spec.run.model_copy(update=run_updates)
    if "pump_grid" in recipe and spec.pump_grid is None:
        updates["pump_grid"] = list(recipe["pump_grid"])
    return spec.model_copy(update=updates) if updates else spec


def preset_setting(name: str, key: str, default: Any = None) -> Any:
    return load_presets()["presets"].get(name, {}).get(key, default)


def parse_experiment(payload: Dict[str, Any]) -> ExperimentSpec:
    try:
        spec = ExperimentSpec.model_validate(payload)
    except ValidationError as e:
        raise ConfigError(f"invalid experiment config:\n{e}") from e
    return apply_preset(spec)


def load_experiment(path: Union[str, Path], overrides: Optional[Dict[str, Any]] = None) -> ExperimentSpec:
    """Read, override top-level keys, validate and apply the preset."""
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise ConfigError(f"config file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise ConfigError(f"config file {path} is not valid JSON: {e}") from e
    if not isinstance(payload, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    payload.update(overrides or {})
    return parse_experiment(payload)


def dump_experiment(spec: ExperimentSpec) -> str:
    return json.dumps(spec.model_dump(mode="json"), indent=2, sort_keys=True) + "\n"
