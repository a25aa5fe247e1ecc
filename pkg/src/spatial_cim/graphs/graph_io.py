"""Graph files: JSON with family, n, params, seed and an explicit edge list."""
import json
from pathlib import Path
from typing import Any, Dict, Union

import numpy as np
from pydantic import ValidationError

from ..errors import GraphError
from .generators import mobius_ladder_couplings
from .models import GraphFamily, GraphInstance, GraphParams

GRAPH_FILE_VERSION = 1


def graph_to_dict(g: GraphInstance) -> Dict[str, Any]:
    return {
        "schema_version": GRAPH_FILE_VERSION,
        "family": g.family.value,
        "n": g.n,
        "params": g.params.model_dump(),
        "seed": g.seed,
        "metadata": g.metadata,
        "edges": [[i, j, w] for i, j, w in g.edges()],
    }


def graph_from_dict(payload: Dict[str, Any]) -> GraphInstance:
    """Rebuild a graph and re-check its invariants."""
    try:
        if payload.get("schema_version", GRAPH_FILE_VERSION) != GRAPH_FILE_VERSION:
            raise GraphError(f"unsupported graph file version {payload.get('schema_version')}")
        family = GraphFamily(payload["family"])
        n = int(payload["n"])
        params = GraphParams.model_validate(payload.get("params", {}))
        seed = int(payload.get("seed", 0))
        edges = payload["edges"]
    except (KeyError, TypeError, ValueError, ValidationError) as e:
        raise GraphError(f"malformed graph file: {e}") from e

    j = np.zeros((n, n))
    for edge in edges:
        try:
            i, k, w = int(edge[0]), int(edge[1]), float(edge[2])
        except (TypeError, ValueError, IndexError) as e:
            raise GraphError(f"malformed edge {edge!r}") from e
        if not 0 <= i < k < n:
            raise GraphError(f"edge ({i}, {k}) must satisfy 0 <= i < j < n={n}")
        if j[i, k] != 0.0:
            raise GraphError(f"duplicate edge ({i}, {k})")
        j[i, k] = j[k, i] = w

    graph = GraphInstance(family, n, j, params, seed, dict(payload.get("metadata", {})))
    _check_family(graph)
    graph.metadata.update(edge_count=graph.edge_count, density=graph.density)
    return graph


def _check_family(g: GraphInstance) -> None:
    weights = {w for _, _, w in g.edges()}
    p = g.params
    if g.family is GraphFamily.MOBIUS_LADDER:
        if g.n % 2 or not np.array_equal(g.j_matrix, mobius_ladder_couplings(g.n, p.alpha)):
            raise GraphError("Mobius ladder file does not match its ring-plus-rung pattern")
    elif g.family is GraphFamily.COMPLETE:
        if g.edge_count != g.n * (g.n - 1) // 2 or weights - {p.gamma, -p.gamma}:
            raise GraphError("complete graph file must carry +-gamma on every pair")
    elif weights - {p.beta, -p.beta}:
        raise GraphError(f"{g.family.value} graph file must carry only +-beta weights")


def save_graph(g: GraphInstance, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(graph_to_dict(g), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return path


def load_graph(path: Union[str, Path]) -> GraphInstance:
    path = Path(path)
    try:
        payload = json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError as e:
        raise GraphError(f"graph file not found: {path}") from e
    except json.JSONDecodeError as e:
        raise GraphError(f"graph file {path} is not valid JSON: {e}") from e
    return graph_from_dict(payload)
