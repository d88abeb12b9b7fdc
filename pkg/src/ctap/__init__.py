"""Coherent transport by adiabatic passage on semi-bipartite graphs."""
from .dynamics import (
    ControlSchedule,
    TransferResult,
    default_schedule,
    evolve,
    find_tstar,
    sequential_schedule,
    simulate,
)
from .generators import FAMILIES, FamilySpec, generate
from .graph import WeightedGraph, adjacency, build_graph, parse_graph, serialize_graph
from .spectral import gap_around_zero, interlacing_gap_bound
from .viability import check_viability, nullity, zero_eigenvector

__version__ = "0.1.0"

__all__ = [
    "ControlSchedule", "TransferResult", "default_schedule", "evolve", "find_tstar",
    "sequential_schedule", "simulate", "FAMILIES", "FamilySpec", "generate", "WeightedGraph",
    "adjacency", "build_graph", "parse_graph", "serialize_graph", "gap_around_zero",
    "interlacing_gap_bound", "check_viability", "nullity", "zero_eigenvector",
]
