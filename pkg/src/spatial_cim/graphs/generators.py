"""
Graph families and the assembly of Q = a*1 + b*J.

Random families draw from the GRAPH stream of the seed. Pairs are visited in
lexicographic order (i < j); edge signs take one draw per present edge in the
same order, so a seed pins J bit for bit.
"""
from typing import Optional, Union

import networkx as nx
import numpy as np
from loguru import logger

from ..coupling import CouplingOperator
from ..errors import GraphError
from ..rng import Stream, derived_int_seed, stream
from .models import CouplingAssembly, GraphFamily, GraphInstance, GraphParams


def default_attachment(n: int, density: float) -> int:
    """Edges per new BA node that approximate the requested density."""
    return max(1, int(np.floor(density * (n - 1) / 2.0 + 0.5)))


def _signs(rng: np.random.Generator, count: int) -> np.ndarray:
    return np.where(rng.integers(0, 2, size=count) == 0, 1.0, -1.0)


def mobius_ladder_couplings(n: int, alpha: float) -> np.ndarray:
    """Ring (i, i+1) plus rungs (i, i+N/2), every edge weighted alpha."""
    j = np.zeros((n, n))
    for i in range(n):
        for k in ((i + 1) % n, (i + n // 2) % n):
            j[i, k] = j[k, i] = alpha
    return j


def _from_pairs(n: int, rows: np.ndarray, cols: np.ndarray, weights: np.ndarray) -> np.ndarray:
    j = np.zeros((n, n))
    j[rows, cols] = weights
    j[cols, rows] = weights
    return j


def make_graph(family: Union[GraphFamily, str], n: int,
               params: Optional[GraphParams] = None, seed: int = 0) -> GraphInstance:
    """
    Build a graph instance.

    Args:
        family: ML, K, ER or BA
        n: number of sites
        params: family parameters (published values by default)
        seed: master seed; only the GRAPH stream is used

    Raises:
        GraphError: n < 2, odd n for ML, attachment >= n for BA
    """
    try:
        family = GraphFamily(family)
    except ValueError as e:
        raise GraphError(f"unknown graph family {family!r}") from e
    params = params or GraphParams()
    if n < 2:
        raise GraphError(f"a graph needs at least 2 sites, got {n}")
    if seed < 0:
        raise GraphError(f"seed must be non-negative, got {seed}")

    metadata = {}
    rows, cols = np.triu_indices(n, k=1)

    if family is GraphFamily.MOBIUS_LADDER:
        if n % 2:
            raise GraphError(f"the Mobius ladder needs an even number of sites, got {n}")
        j = mobius_ladder_couplings(n, params.alpha)

    elif family is GraphFamily.COMPLETE:
        rng = stream(seed, Stream.GRAPH)
        j = _from_pairs(n, rows, cols, params.gamma * _signs(rng, rows.size))

    elif family is GraphFamily.ERDOS_RENYI:
        rng = stream(seed, Stream.GRAPH)
        present = rng.random(rows.size) < params.density
        weights = params.beta * _signs(rng, int(present.sum()))
        j = _from_pairs(n, rows[present], cols[present], weights)

    else:
        m = params.attachment or default_attachment(n, params.density)
        if m >= n:
            raise GraphError(f"BA attachment count must be below n={n}, got {m}")
        g = nx.barabasi_albert_graph(n, m, seed=derived_int_seed(seed, Stream.GRAPH, 1))
        pairs = sorted((min(u, v), max(u, v)) for u, v in g.edges())
        rng = stream(seed, Stream.GRAPH)
        ba_rows = np.array([p[0] for p in pairs], dtype=np.intp)
        ba_cols = np.array([p[1] for p in pairs], dtype=np.intp)
        j = _from_pairs(n, ba_rows, ba_cols, params.beta * _signs(rng, len(pairs)))
        metadata["attachment"] = m

    graph = GraphInstance(family, n, j, params, seed, metadata)
    graph.metadata.update(edge_count=graph.edge_count, density=graph.density)
    logger.debug(f"[Graphs] built {family.value} n={n} seed={seed}: "
                 f"{graph.edge_count} edges, density {graph.density:.4f}")
    return graph


def assemble_q(g: GraphInstance, asm: CouplingAssembly,
               allow_active: bool = False) -> CouplingOperator:
    """
    Q = a*1 + b*J as a coupling operator.

    Circulant graphs (the Mobius ladder) give a circulant operator whose
    kernel is the first row of Q; every other family gives a dense one.

    Raises:
        PassivityError: rho(Q) >= 1 and ``allow_active`` is False
    """
    q = asm.a * np.eye(g.n) + asm.b * g.j_matrix
    if g.family is GraphFamily.MOBIUS_LADDER and g.is_circulant:
        op = CouplingOperator.circulant(q[0], allow_active=allow_active)
    else:
        op = CouplingOperator.dense(q, allow_active=allow_active)
    logger.info(f"[Graphs] assembled {op.variant.value} Q for {g.family.value} n={g.n}: "
                f"rho(Q) = {op.spectral_radius:.6f}")
    return op
