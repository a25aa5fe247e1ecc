"""Ising coupling graphs and the assembly of the SLM matrix Q."""
from .models import CouplingAssembly, GraphFamily, GraphInstance, GraphParams
from .generators import assemble_q, default_attachment, make_graph
from .graph_io import graph_from_dict, graph_to_dict, load_graph, save_graph

__all__ = [
    "CouplingAssembly",
    "GraphFamily",
    "GraphInstance",
    "GraphParams",
    "assemble_q",
    "default_attachment",
    "graph_from_dict",
    "graph_to_dict",
    "load_graph",
    "make_graph",
    "save_graph",
]
