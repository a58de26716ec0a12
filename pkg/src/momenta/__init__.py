"""Upper and lower bounds on sums of squared expectation values of operators
with prescribed commutation phases, via moment-matrix hierarchies."""
from .graph import (CommutationGraph, GraphParseError, OddHole, encode_graph6,
                    enumerate_odd_holes, independence_number, parse_graph6,
                    parse_weighted_edgelist)
from .bounds import (BoundOptions, BoundReport, full_report, lovasz_reference, nu, theta,
                     uncertainty_constant)
from .sdp import SolverError, SolverOptions

__version__ = "0.1.0"

__all__ = [
    "BoundOptions", "BoundReport", "CommutationGraph", "GraphParseError", "OddHole",
    "SolverError", "SolverOptions", "encode_graph6", "enumerate_odd_holes", "full_report",
    "independence_number", "lovasz_reference", "nu", "parse_graph6",
    "parse_weighted_edgelist", "theta", "uncertainty_constant",
]
