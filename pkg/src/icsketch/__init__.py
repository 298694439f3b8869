"""Influence maximization with compressed connectivity sketches."""
from ._backend import available as available_backends
from .graph import (
    CapacityError,
    Constant,
    DegreeWeighted,
    Graph,
    GraphFormatError,
    UniformRange,
    edge_probability,
    load_edge_list,
    parse_model,
    read_csr,
    read_edge_list,
    read_graph,
    write_csr,
    write_edge_list,
)
from .pqueue import OrderedScoreTree, ScoreKey, WinTree, wt_build
from .sampling import edge_key, mix64, sample
from .select import SeedResult, init_scores, select, select_celf, select_exhaustive, select_ptree, select_wintree
from .simulate import SimEstimate, exact_sigma_small, simulate_ic
from .sketch import CenterSet, EvalStats, SketchSet, select_centers

__all__ = [
    "CapacityError",
    "CenterSet",
    "Constant",
    "DegreeWeighted",
    "EvalStats",
    "Graph",
    "GraphFormatError",
    "OrderedScoreTree",
    "ScoreKey",
    "SeedResult",
    "SimEstimate",
    "SketchSet",
    "UniformRange",
    "WinTree",
    "available_backends",
    "edge_key",
    "edge_probability",
    "exact_sigma_small",
    "init_scores",
    "load_edge_list",
    "mix64",
    "parse_model",
    "read_csr",
    "read_edge_list",
    "read_graph",
    "sample",
    "select",
    "select_celf",
    "select_centers",
    "select_exhaustive",
    "select_ptree",
    "select_wintree",
    "simulate_ic",
    "write_csr",
    "write_edge_list",
]
