"""Spectral graph methods with dense brute-force oracles.

Submodules: ``graph`` (construction, Laplacians, cut objectives), ``spectra``
(eigensolvers, sweep cuts, spectral clustering), ``diffusion`` (walks, heat
kernel, PageRank, regularized-SDP checks), ``local`` (push, MOV, localized
cuts), ``resistance``, ``sparsify``, ``solver`` (Laplacian solves and SSL),
``sbm`` and ``cli``.
"""

from ._backend import BACKEND
from .errors import (
    ConvergenceError,
    DegenerateDegreeError,
    DisconnectedGraphError,
    DuplicateEdgeError,
    InfeasibleParameterError,
    InvariantViolation,
    NonPositiveWeightError,
    SelfLoopError,
    SpecGraphError,
    ValidationError,
    VertexRangeError,
)
from .graph import Graph, build_graph, gen_family, gen_random, laplacian, partition_quality
from .io import read_edge_list, write_edge_list

__version__ = "0.1.0"

__all__ = [
    "BACKEND",
    "ConvergenceError",
    "DegenerateDegreeError",
    "DisconnectedGraphError",
    "DuplicateEdgeError",
    "Graph",
    "InfeasibleParameterError",
    "InvariantViolation",
    "NonPositiveWeightError",
    "SelfLoopError",
    "SpecGraphError",
    "ValidationError",
    "VertexRangeError",
    "build_graph",
    "gen_family",
    "gen_random",
    "laplacian",
    "partition_quality",
    "read_edge_list",
    "write_edge_list",
]
