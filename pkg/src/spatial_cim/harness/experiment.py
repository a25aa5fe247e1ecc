"""
Experiment runner: one machine run per seed against a reference energy.

Seeds run on a joblib thread pool. Each seed writes its own files and the
aggregate is computed after all seeds joined, in seed order, so the thread
count never changes a result.
"""
from pathlib import Path
from typing import Optional, Tuple, Union

from joblib import Parallel, delayed
from loguru import logger

from ..config import EnvConfig
from ..config.schema import ExperimentSpec, dump_experiment, preset_setting
from ..coupling import CouplingOperator, threshold_pump
from ..errors import ConfigError, NoThresholdError, SpatialCIMError
from ..graphs import GraphFamily, GraphInstance, assemble_q, load_graph, make_graph, save_graph
from ..machine import (
    Trajectory,
    run,
    trajectory_summary,
    write_fields,
    write_json,
    write_quadratures_csv,
    write_trajectory_csv,
)
from ..oracles import GroundState, circulant_ground_state, metropolis_anneal
from ..tracer import trace_stage, tracer
from .models import ReportBundle, SeedFailure, SeedResult, aggregate, hardware_time, is_success
from .threshold import bracket_threshold

QUADRATURE_TAU_MAX = 300


def build_graph(spec: ExperimentSpec) -> GraphInstance:
    if spec.graph_file is not None:
        return load_graph(spec.graph_file)
    g = spec.graph
    return make_graph(g.family, g.n, g.params, seed=g.seed)


@trace_stage("oracle")
def reference_ground_state(graph: GraphInstance, spec: ExperimentSpec) -> GroundState:
    """Eigenvector readout for the Mobius ladder, best annealing result otherwise."""
    if graph.family is GraphFamily.MOBIUS_LADDER and graph.is_circulant:
        return circulant_ground_state(graph)
    return metropolis_anneal(graph, spec.anneal, seed=spec.anneal_seed)


def seed_stem(seed: int) -> str:
    return f"seed_{seed:04d}"


def _wants_quadratures(spec: ExperimentSpec) -> bool:
    return "quadratures" in spec.outputs.formats or spec.preset == "fig2-quadratures"


def _run_seed(seed: int, graph: GraphInstance, op: CouplingOperator, spec: ExperimentSpec,
              oracle_energy: float, out_dir: Path, config_hash: str,
              progress: bool) -> Union[Tuple[SeedResult, Trajectory], SeedFailure]:
    cfg = spec.run.model_copy(update={"seed": seed})
    stem = seed_stem(seed)
    stage = "run"
    try:
        with tracer.stage("run", seed):
            traj = run(graph, spec.assembly, cfg, op=op, progress=progress)

        stage = "write"
        with tracer.stage("write", seed):
            success = is_success(traj.final_energy, traj.oscillating, oracle_energy)
            formats = spec.outputs.formats
            if "json" in formats:
                write_json({**trajectory_summary(traj), "success": success,
                            "oracle_energy": oracle_energy},
                           out_dir / f"{stem}.json", config_hash)
            if "csv" in formats and cfg.record_fields != "none":
                write_trajectory_csv(traj, out_dir / f"{stem}.csv", config_hash)
            if cfg.record_fields == "full":
                if _wants_quadratures(spec):
                    write_quadratures_csv(traj, out_dir / f"{stem}_quadratures.csv", config_hash,
                                          tau_max=QUADRATURE_TAU_MAX)
                if "fields" in formats:
                    write_fields(traj, out_dir, config_hash, stem=f"{stem}_fields")
            elif _wants_quadratures(spec) or "fields" in formats:
                logger.warning(f"[Harness] seed {seed}: field outputs need record_fields='full', skipped")
    except SpatialCIMError as e:
        kind = "config" if isinstance(e, ConfigError) else "numerical"
        logger.error(f"[Harness] seed {seed} failed during {stage}: {e}")
        return SeedFailure(seed, stage, str(e), kind)

    logger.info(f"[Harness] seed {seed}: final energy {traj.final_energy:.6g} "
                f"(oracle {oracle_energy:.6g}), settled at tau={traj.settle_round_trip}")
    result = SeedResult(seed, traj.final_energy, traj.oscillating, traj.converged,
                        traj.settle_round_trip, success)
    return result, traj


def physical_summary(spec: ExperimentSpec, op: CouplingOperator) -> dict:
    units = spec.run.units.to_units()
    try:
        threshold: Optional[float] = threshold_pump(op, spec.run.r_out, units)
    except NoThresholdError:
        threshold = None
    return {
        **units.describe(),
        "rho": op.spectral_radius,
        "coupling_variant": op.variant.value,
        "threshold_a0": threshold,
        "threshold_volts_per_m": units.to_volts_per_m(threshold) if threshold is not None else None,
    }


def run_experiment(spec: ExperimentSpec, *, threads: Optional[int] = None,
                   out_dir: Optional[Union[str, Path]] = None,
                   progress: bool = False) -> ReportBundle:
    """
    Run every seed of an experiment and write its outputs.

    Args:
        spec: validated experiment (presets already applied)
        threads: seed workers; defaults to SPATIAL_CIM_THREADS
        out_dir: output directory; defaults to ``spec.output_dir()``
        progress: tqdm bar per seed

    Returns:
        ReportBundle; failed seeds appear in ``failures`` and the outputs of
        the other seeds are kept
    """
    threads = threads or EnvConfig.get_threads()
    out = Path(out_dir) if out_dir is not None else spec.output_dir()
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise ConfigError(f"output directory {out} is not writable: {e}") from e
    config_hash = spec.config_hash()
    tracer.clear()
    logger.info(f"[Harness] experiment '{spec.name}' ({config_hash}): {len(spec.seeds)} seeds, "
                f"{threads} worker(s), output in {out}")

    (out / "config.json").write_text(dump_experiment(spec), encoding="utf-8")
    with tracer.stage("graph"):
        graph = build_graph(spec)
        op = assemble_q(graph, spec.assembly, allow_active=spec.allow_active_coupling)
    save_graph(graph, out / "graph.json")
    oracle = reference_ground_state(graph, spec)
    write_json(oracle.to_dict(), out / "oracle.json", config_hash)

    outcomes = Parallel(n_jobs=threads, prefer="threads")(
        delayed(_run_seed)(seed, graph, op, spec, oracle.energy, out, config_hash, progress)
        for seed in spec.seeds
    )

    results, failures, trajectories = [], [], {}
    for outcome in outcomes:
        if isinstance(outcome, SeedFailure):
            failures.append(outcome)
            continue
        result, traj = outcome
        results.append(result)
        trajectories[result.seed] = traj

    threshold_check = None
    if spec.preset == "threshold-check":
        threshold_check = _threshold_check(spec, op)

    bundle = ReportBundle(
        name=spec.name,
        config_hash=config_hash,
        oracle=oracle.to_dict(),
        results=results,
        failures=failures,
        aggregate=aggregate([r.to_dict() for r in results], len(spec.seeds)),
        hardware_time=hardware_time(spec.run),
        physical=physical_summary(spec, op),
        trajectories=trajectories,
        threshold_check=threshold_check,
        stage_stats=tracer.get_stats(),
    )
    write_json(bundle.to_dict(), out / "report.json", config_hash)
    write_json({"stage_stats": bundle.stage_stats}, out / "stages.json", config_hash)
    logger.info(f"[Harness] '{spec.name}': success fraction {bundle.aggregate['success_fraction']:.2f}, "
                f"{len(failures)} failed seed(s)")
    return bundle


def _threshold_check(spec: ExperimentSpec, op: CouplingOperator) -> dict:
    with tracer.stage("threshold-check"):
        bracket = bracket_threshold(
            op.spectral_radius, spec.run,
            round_trips=preset_setting("threshold-check", "bracket_round_trips", 50),
            rel_tol=preset_setting("threshold-check", "bracket_rel_tol", 1e-4),
        )
    return bracket.to_dict()
