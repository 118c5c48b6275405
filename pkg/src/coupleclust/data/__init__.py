"""Bundled example graphs.

Currently one dataset: the 34-node, 78-edge karate club friendship network,
a standard small benchmark for graph clustering. Stored as a tab-separated
edge list with unit weights.
"""

from importlib.resources import files
from pathlib import Path

from ..graph import WeightedGraph, load_edge_list

__all__ = ["karate_path", "load_karate"]


def karate_path() -> Path:
    """Filesystem path of the bundled karate club edge list."""
    return Path(str(files(__package__) / "karate_club.tsv"))


def load_karate() -> WeightedGraph:
    """The karate club network: 34 nodes, 78 unit-weight edges."""
    return load_edge_list(karate_path())
