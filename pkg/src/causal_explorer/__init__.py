"""Exploratory causal analysis toolkit.

Select feature subsets with unsupervised methods, run an ensemble of causal
discovery algorithms on each subset and rank the candidate graphs by SHD and
AUPRC against a known or proxy target graph.
"""

from .data import CONTINUOUS, ColumnKind, Dataset, load_csv, select_columns, standardize, write_csv
from .discovery import DiscoveryResult, detect_latent_edges, hill_climb, ic_algorithm, pc
from .ensemble import EnsembleConfig, RunRecord, latent_report, proxy_target, run_ensemble, sweep_features
from .errors import InputError, NumericalError, ParseError
from .graph import Mark, MixedGraph, cpdag_of, d_separated, from_edge_list, to_dot, to_edge_list
from .metrics import auprc, shd

__version__ = "0.1.0"

__all__ = [
    "CONTINUOUS",
    "ColumnKind",
    "Dataset",
    "DiscoveryResult",
    "EnsembleConfig",
    "InputError",
    "Mark",
    "MixedGraph",
    "NumericalError",
    "ParseError",
    "RunRecord",
    "auprc",
    "cpdag_of",
    "d_separated",
    "detect_latent_edges",
    "from_edge_list",
    "hill_climb",
    "ic_algorithm",
    "latent_report",
    "load_csv",
    "pc",
    "proxy_target",
    "run_ensemble",
    "select_columns",
    "shd",
    "standardize",
    "sweep_features",
    "to_dot",
    "to_edge_list",
    "write_csv",
]
