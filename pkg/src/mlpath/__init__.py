"""Shortest feasible paths in multi-layer networks with encapsulation."""

from .bfs import SearchTimeout, bfs_shortest, dfs_feasible
from .dag import dag_bfs, dag_pda, dagify
from .model import (
    AdaptationFunction,
    FeasibilityReport,
    Kind,
    MLPath,
    MultiLayerNetwork,
    Reason,
    Step,
    Symbol,
    Tag,
    check_feasibility,
    in_set,
    out_set,
    path_bandwidth,
    path_qos,
    path_weight,
    trace_of,
)
from .pipeline import Metric, Result, pipeline_stats, shortest_feasible_path
from .reduction import sym_ham_reduce
from .samcra import ConstraintSet, ml_samcra
from .topology import parse, read_topology, serialize, write_topology

__all__ = [
    "AdaptationFunction",
    "ConstraintSet",
    "FeasibilityReport",
    "Kind",
    "MLPath",
    "Metric",
    "MultiLayerNetwork",
    "Reason",
    "Result",
    "SearchTimeout",
    "Step",
    "Symbol",
    "Tag",
    "bfs_shortest",
    "check_feasibility",
    "dag_bfs",
    "dag_pda",
    "dagify",
    "dfs_feasible",
    "in_set",
    "ml_samcra",
    "out_set",
    "parse",
    "path_bandwidth",
    "path_qos",
    "path_weight",
    "pipeline_stats",
    "read_topology",
    "serialize",
    "shortest_feasible_path",
    "sym_ham_reduce",
    "trace_of",
    "write_topology",
]
