"""
Command line entry point.

    spatial-cim generate-graph --family ML --n 112 --seed 0 --out graph.json
    spatial-cim run --config experiment.json --threads 4
    spatial-cim sweep --config experiment.json --grid 1.05 1.2 1.5
    spatial-cim anneal --graph graph.json --seed 3
    spatial-cim exact --graph graph.json
    spatial-cim report runs/ml112

Exit codes: 0 success, 2 configuration error, 3 numerical failure.
"""
import argparse
import hashlib
import json
import sys
from pathlib import Path
from typing import List, Optional, get_args

from loguru import logger

from ..config import EnvConfig, configure_logging, load_experiment
from ..config.schema import PresetName
from ..errors import ConfigError, DimensionError, NumericalError, SpatialCIMError
from ..graphs import GraphFamily, GraphParams, graph_to_dict, load_graph, make_graph, save_graph
from ..machine import write_json
from ..oracles import (
    MAX_SITES,
    AnnealSchedule,
    brute_force_ground_state,
    circulant_ground_state,
    metropolis_anneal,
)
from .experiment import build_graph, run_experiment
from .report import recompute_report
from .sweep import pump_sweep

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_NUMERICAL = 3

PRESETS = list(get_args(PresetName))


def _load_spec(args):
    overrides = {}
    if getattr(args, "preset", None):
        overrides["preset"] = args.preset
    if getattr(args, "seed", None) is not None:
        overrides["seeds"] = [args.seed]
    return load_experiment(args.config, overrides)


def _graph_for(args):
    if getattr(args, "graph", None):
        return load_graph(args.graph)
    if getattr(args, "config", None):
        return build_graph(load_experiment(args.config))
    raise ConfigError("give --graph <file> or --config <experiment>")


def _graph_hash(graph, **extra) -> str:
    blob = json.dumps({"graph": graph_to_dict(graph), **extra}, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode("utf-8")).hexdigest()[:16]


def _emit(payload: dict, out: Optional[str], config_hash: str) -> None:
    if out:
        write_json(payload, out, config_hash)
        print(f"wrote {out}")
    else:
        print(json.dumps({"config_hash": config_hash, **payload}, indent=2, sort_keys=True))


def cmd_generate_graph(args) -> int:
    if args.config:
        graph = build_graph(load_experiment(args.config))
    else:
        if not args.family or args.n is None:
            raise ConfigError("generate-graph needs --config or both --family and --n")
        graph = make_graph(GraphFamily(args.family), args.n, GraphParams(), seed=args.seed or 0)
    path = save_graph(graph, args.out)
    print(f"wrote {path}: {graph.family.value} n={graph.n}, {graph.edge_count} edges")
    return EXIT_OK


def cmd_run(args) -> int:
    spec = _load_spec(args)
    bundle = run_experiment(spec, threads=args.threads, out_dir=args.out, progress=args.progress)
    agg = bundle.aggregate
    print(f"{spec.name}: {agg['n_success']}/{agg['n_seeds']} seeds reached the "
          f"{bundle.oracle['method']} energy {bundle.oracle['energy']:.6g}")
    for failure in bundle.failures:
        print(f"seed {failure.seed} failed during {failure.stage}: {failure.message}", file=sys.stderr)
    if any(f.kind == "numerical" for f in bundle.failures):
        return EXIT_NUMERICAL
    return EXIT_CONFIG if bundle.failures else EXIT_OK


def cmd_sweep(args) -> int:
    spec = _load_spec(args)
    table = pump_sweep(spec, args.grid, threads=args.threads, out_dir=args.out, progress=args.progress)
    print(table.to_string(index=False))
    return EXIT_OK


def cmd_anneal(args) -> int:
    graph = _graph_for(args)
    sched, seed = AnnealSchedule(), 0
    if getattr(args, "config", None):
        spec = load_experiment(args.config)
        sched, seed = spec.anneal, spec.anneal_seed
    overrides = {k: v for k, v in (("sweeps", args.sweeps), ("restarts", args.restarts)) if v is not None}
    if overrides:
        sched = sched.model_copy(update=overrides)
    if args.seed is not None:
        seed = args.seed
    result = metropolis_anneal(graph, sched, seed=seed)
    _emit(result.to_dict(), args.out,
          _graph_hash(graph, schedule=sched.model_dump(mode="json"), seed=seed))
    return EXIT_OK


def cmd_exact(args) -> int:
    graph = _graph_for(args)
    if graph.n <= MAX_SITES:
        result = brute_force_ground_state(graph)
    elif graph.is_circulant:
        result = circulant_ground_state(graph)
    else:
        raise ConfigError(f"no exact solver for a non-circulant graph with n={graph.n} > {MAX_SITES}")
    _emit(result.to_dict(), args.out, _graph_hash(graph, method=result.method))
    return EXIT_OK


def cmd_report(args) -> int:
    summary = recompute_report(args.directory)
    print(json.dumps(summary, indent=2, sort_keys=True))
    return EXIT_OK if summary["consistent"] else EXIT_CONFIG


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="spatial-cim", description="Spatial coherent Ising machine simulator")
    parser.add_argument("--log-level", default=None, help="overrides LOG_LEVEL")
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate-graph", help="write a graph instance as JSON")
    gen.add_argument("--config", help="experiment file whose graph is generated")
    gen.add_argument("--family", choices=[f.value for f in GraphFamily])
    gen.add_argument("--n", type=int)
    gen.add_argument("--seed", type=int, default=None)
    gen.add_argument("--out", required=True)
    gen.set_defaults(func=cmd_generate_graph)

    for name, func, help_text in (("run", cmd_run, "run an experiment over its seeds"),
                                  ("sweep", cmd_sweep, "repeat an experiment over pump multiples")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--config", required=True)
        p.add_argument("--seed", type=int, default=None, help="run this seed only")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument("--preset", choices=PRESETS, default=None)
        p.add_argument("--threads", type=int, default=None, help="seed workers; never changes results")
        p.add_argument("--progress", action="store_true")
        if name == "sweep":
            p.add_argument("--grid", type=float, nargs="+", default=None, help="multiples of threshold")
        p.set_defaults(func=func)

    ann = sub.add_parser("anneal", help="Metropolis annealing on a graph")
    ann.add_argument("--graph")
    ann.add_argument("--config")
    ann.add_argument("--seed", type=int, default=None)
    ann.add_argument("--sweeps", type=int, default=None)
    ann.add_argument("--restarts", type=int, default=None)
    ann.add_argument("--out", default=None, help="result JSON file (stdout if omitted)")
    ann.set_defaults(func=cmd_anneal)

    exact = sub.add_parser("exact", help="exact ground state (brute force or circulant eigenvector)")
    exact.add_argument("--graph")
    exact.add_argument("--config")
    exact.add_argument("--out", default=None, help="result JSON file (stdout if omitted)")
    exact.set_defaults(func=cmd_exact)

    rep = sub.add_parser("report", help="recount an experiment's aggregate from per-seed files")
    rep.add_argument("directory")
    rep.set_defaults(func=cmd_report)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    configure_logging(args.log_level)
    if getattr(args, "threads", None) is None and hasattr(args, "threads"):
        args.threads = EnvConfig.get_threads()
    try:
        return args.func(args)
    except (ConfigError, DimensionError) as e:
        logger.error(f"[CLI] {e}")
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except NumericalError as e:
        logger.error(f"[CLI] {e}")
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SpatialCIMError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_CONFIG
