"""Hypergraph representation learning with hyperedge neurons.

Core pieces: an incidence-list hypergraph type with degree-power
normalization tables, clique/star expansion algebra with executable
structural checks, a small dense reverse-mode autodiff engine, the HNHN
convolution model, and a training/evaluation stack with a CLI front end.
"""

from hnhn.hypergraph import (
    Hypergraph,
    NormalizationTables,
    build_hypergraph,
    degree_stats,
    normalization_tables,
    prune,
)

__all__ = [
    "Hypergraph",
    "NormalizationTables",
    "build_hypergraph",
    "degree_stats",
    "normalization_tables",
    "prune",
]

__version__ = "0.1.0"
