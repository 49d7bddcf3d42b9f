"""Exact references: branch-and-bound MWCP and brute-force scheduling."""
from __future__ import annotations

import itertools

import numpy as np

from ._validation import check_graph
from .allocation import Allocation, Session
from .channel import ChannelRealization, RelayStrategy
from .graph import ConflictGraph, SolveResult, relay_candidates
from .rates import ModeTag, SessionSubcarriers, TransmissionMode, session_rate

DEFAULT_MAX_VERTICES = 400
EXHAUSTIVE_MAX_VERTICES = 25


class GraphTooLargeError(ValueError):
    pass


def enumerate_cliques(adjacency: np.ndarray):
    """Yield every clique (including the empty one) as a tuple of indices."""
    V = adjacency.shape[0]
    nbrs = [set(np.flatnonzero(adjacency[v]).tolist()) for v in range(V)]

    def extend(clique, cands):
        yield clique
        for v in sorted(cands):
            yield from extend(clique + (v,), {u for u in cands if u > v and u in nbrs[v]})

    yield from extend((), set(range(V)))


def _exhaustive(graph: ConflictGraph):
    best, best_w, count = (), 0.0, 0
    for clique in enumerate_cliques(graph.adjacency):
        count += 1
        w = graph.clique_weight(clique)
        if w > best_w:
            best, best_w = clique, w
    return best, count


def _branch_and_bound(graph: ConflictGraph):
    # relabel so bit i is the i-th heaviest vertex
    order = np.argsort(-graph.weights, kind="stable")
    w = [max(float(x), 0.0) for x in graph.weights[order]]
    adj = graph.adjacency[np.ix_(order, order)]
    nbr = [int.from_bytes(np.packbits(row, bitorder="little").tobytes(), "little") for row in adj]
    best = {"w": 0.0, "clique": [], "nodes": 0}
    eps = 1e-12

    def expand(cur, cur_w, P):
        best["nodes"] += 1
        if P == 0:
            if cur_w > best["w"] + eps:
                best["w"], best["clique"] = cur_w, list(cur)
            return
        # greedy colouring: each class is independent, so a clique takes at most one per class
        bounded = []
        remaining = P
        cum = 0.0
        while remaining:
            avail = remaining
            first = True
            while avail:
                v = (avail & -avail).bit_length() - 1
                if first:
                    cum += w[v]
                    first = False
                bounded.append((v, cum))
                bit = 1 << v
                remaining &= ~bit
                avail &= ~bit & ~nbr[v]
        for v, ub in reversed(bounded):
            if cur_w + ub <= best["w"] + eps:
                if cur_w > best["w"] + eps:
                    best["w"], best["clique"] = cur_w, list(cur)
                return
            cur.append(v)
            expand(cur, cur_w + w[v], P & nbr[v])
            cur.pop()
            P &= ~(1 << v)
        if cur_w > best["w"] + eps:
            best["w"], best["clique"] = cur_w, list(cur)

    expand([], 0.0, (1 << len(w)) - 1)
    clique = tuple(int(order[i]) for i in best["clique"])
    return clique, best["nodes"]


def solve_exact(
    graph: ConflictGraph,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    method: str = "auto",
) -> SolveResult:
    """Maximum weighted clique by depth-first branch and bound.

    Graphs with at most 25 vertices are enumerated exhaustively unless
    ``method="bnb"`` is forced.  Larger graphs than ``max_vertices`` are
    refused.
    """
    check_graph(graph)
    V = len(graph)
    if V > max_vertices:
        raise GraphTooLargeError(f"graph has {V} vertices, exact solver cap is {max_vertices}")
    if V == 0:
        return SolveResult((), 0.0, 0, np.zeros(0))
    if method not in ("auto", "bnb", "exhaustive"):
        raise ValueError(f"unknown method {method!r}")
    if method == "exhaustive" or (method == "auto" and V <= EXHAUSTIVE_MAX_VERTICES):
        clique, nodes = _exhaustive(graph)
    else:
        clique, nodes = _branch_and_bound(graph)
    clique = tuple(sorted(clique))
    weight = graph.clique_weight(clique)
    return SolveResult(clique, weight, nodes, np.array([weight]))


def enumerate_sessions(
    real: ChannelRealization,
    strategy: RelayStrategy = RelayStrategy.DF_XOR,
    xi: float = 0.5,
    theta: float = 0.5,
) -> list[Session]:
    """Every (MS, mode, relays, subcarriers) session with its rate pair."""
    K, N = real.num_ms, real.num_subcarriers
    out = []
    mode_a = TransmissionMode(ModeTag.A)
    relay_modes = relay_candidates(real.num_rs)
    for k in range(K):
        for n1, n2 in itertools.product(range(N), repeat=2):
            sc = SessionSubcarriers(n1, n2)
            out.append(Session(k, mode_a, (n1, n2, None), session_rate(real, k, mode_a, sc, strategy, xi, theta)))
        for n1, n2, n3 in itertools.product(range(N), repeat=3):
            sc = SessionSubcarriers(n1, n2, n3)
            for mode in relay_modes:
                out.append(Session(k, mode, (n1, n2, n3), session_rate(real, k, mode, sc, strategy, xi, theta)))
    return out


def solve_p1_bruteforce(
    real: ChannelRealization,
    strategy: RelayStrategy = RelayStrategy.DF_XOR,
    xi: float = 0.5,
    theta: float = 0.5,
) -> Allocation:
    """Optimal schedule by enumerating every feasible set of sessions.

    Works directly on the binary session variables, without the per-vertex
    maximisation, so it is an independent check of the graph reduction.
    Only practical for N <= 2 with a handful of MSs and relays.
    """
    sessions = enumerate_sessions(real, strategy, xi, theta)
    N = real.num_subcarriers
    by_n1 = [[s for s in sessions if s.subcarriers[0] == n] for n in range(N)]
    best = {"w": -1.0, "chosen": []}

    def search(n1, used2, used3, chosen, total):
        if n1 == N:
            if total > best["w"]:
                best["w"], best["chosen"] = total, list(chosen)
            return
        search(n1 + 1, used2, used3, chosen, total)  # subcarrier n1 idle in slot 1
        for s in by_n1[n1]:
            _, n2, n3 = s.subcarriers
            if n2 in used2 or (n3 is not None and n3 in used3):
                continue
            chosen.append(s)
            search(
                n1 + 1,
                used2 | {n2},
                used3 if n3 is None else used3 | {n3},
                chosen,
                total + s.rates.total,
            )
            chosen.pop()

    search(0, frozenset(), frozenset(), [], 0.0)
    return Allocation(num_slots=3, sessions=best["chosen"])
