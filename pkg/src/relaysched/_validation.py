"""Input checks shared by the solvers and estimators."""
from __future__ import annotations

import numpy as np

from .channel import ChannelRealization
from .graph import ConflictGraph


def check_graph(graph) -> ConflictGraph:
    if not isinstance(graph, ConflictGraph):
        raise TypeError(f"expected a ConflictGraph, got {type(graph).__name__}")
    adj = graph.adjacency
    if adj.size and (np.any(np.diag(adj)) or not np.array_equal(adj, adj.T)):
        raise ValueError("adjacency must be symmetric without self-loops")
    if not np.all(np.isfinite(graph.weights)):
        raise ValueError("vertex weights must be finite")
    return graph


def check_realization(real) -> ChannelRealization:
    if not isinstance(real, ChannelRealization):
        raise TypeError(f"expected a ChannelRealization, got {type(real).__name__}")
    for name in ("gain_bm", "gain_br", "gain_mr"):
        arr = getattr(real, name)
        if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr < 0)):
            raise ValueError(f"{name} must be finite and non-negative")
    return real
