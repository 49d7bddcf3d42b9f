"""MAX-MIN ant colony search for the maximum weighted clique.

Pheromone lives on vertices.  Each ant starts from a uniformly random vertex
and keeps adding a neighbour of every current member, drawn with probability
proportional to ``tau ** alpha``, until no candidate is left.  The heaviest
clique of each iteration reinforces the best-so-far clique.
"""
from __future__ import annotations

from dataclasses import dataclass

import numba
import numpy as np

from ._validation import check_graph
from .graph import ConflictGraph, SolveResult


@dataclass(frozen=True)
class AcoParams:
    tau_min: float = 0.01
    tau_max: float = 6.0
    alpha: float = 1.0
    rho: float = 0.99
    nb_ants: int = 10
    max_iterations: int = 500
    rng_seed: int = 0
    # weight ** beta blended into the attractiveness; 0 disables it
    beta: float = 0.0

    def __post_init__(self):
        if not 0 < self.tau_min < self.tau_max:
            raise ValueError(f"need 0 < tau_min < tau_max, got {self.tau_min}, {self.tau_max}")
        if not 0 < self.rho < 1:
            raise ValueError(f"rho must lie in (0, 1), got {self.rho}")
        if self.nb_ants < 1:
            raise ValueError("nb_ants must be >= 1")
        if self.max_iterations < 0:
            raise ValueError("max_iterations must be >= 0")


@dataclass(frozen=True)
class AcoResult(SolveResult):
    pheromone: np.ndarray | None = None
    # per-iteration (min tau, max tau) after the update
    pheromone_range: np.ndarray | None = None


@numba.njit(cache=True)
def _construct(adj, attract, rng, out, cand):
    V = adj.shape[0]
    first = rng.integers(0, V)
    out[0] = first
    size = 1
    nc = 0
    for j in range(V):
        if adj[first, j]:
            cand[nc] = j
            nc += 1
    while nc > 0:
        total = 0.0
        for i in range(nc):
            total += attract[cand[i]]
        pick = nc - 1
        if total > 0.0:
            u = rng.random() * total
            acc = 0.0
            for i in range(nc):
                acc += attract[cand[i]]
                if u < acc:
                    pick = i
                    break
        else:
            pick = min(int(rng.random() * nc), nc - 1)
        v = cand[pick]
        out[size] = v
        size += 1
        m = 0
        for i in range(nc):
            c = cand[i]
            if adj[v, c]:
                cand[m] = c
                m += 1
        nc = m
    return size


@numba.njit(cache=True)
def _update(tau, best, n_best, best_w, iter_w, rho, tau_min, tau_max):
    reward = 1.0 / (1.0 + best_w - iter_w)
    for i in range(tau.shape[0]):
        tau[i] *= rho
    for i in range(n_best):
        tau[best[i]] += reward
    for i in range(tau.shape[0]):
        if tau[i] < tau_min:
            tau[i] = tau_min
        elif tau[i] > tau_max:
            tau[i] = tau_max


@numba.njit(cache=True)
def _run(adj, weights, eta, tau, alpha, rho, tau_min, tau_max, n_ants, max_iter, target, rng):
    V = adj.shape[0]
    trace = np.empty(max_iter)
    tau_range = np.empty((max_iter, 2))
    buf = np.empty(V, np.int64)
    cand = np.empty(V, np.int64)
    it_best = np.empty(V, np.int64)
    best = np.empty(V, np.int64)
    attract = np.empty(V)
    n_best = 0
    best_w = -np.inf
    used = 0
    for it in range(max_iter):
        for i in range(V):
            attract[i] = tau[i] ** alpha * eta[i]
        iter_w = -np.inf
        n_iter = 0
        for a in range(n_ants):
            size = _construct(adj, attract, rng, buf, cand)
            w = 0.0
            for i in range(size):
                w += weights[buf[i]]
            if w > iter_w:
                iter_w = w
                n_iter = size
                it_best[:size] = buf[:size]
        if iter_w > best_w:
            best_w = iter_w
            n_best = n_iter
            best[:n_iter] = it_best[:n_iter]
        _update(tau, best, n_best, best_w, iter_w, rho, tau_min, tau_max)
        trace[it] = best_w
        tau_range[it, 0] = tau.min()
        tau_range[it, 1] = tau.max()
        used = it + 1
        if best_w >= target:
            break
    return best[:n_best].copy(), best_w, used, trace[:used].copy(), tau_range[:used].copy()


def _attractiveness_base(graph: ConflictGraph, beta: float) -> np.ndarray:
    if beta == 0:
        return np.ones(len(graph))
    return np.maximum(graph.weights, 0.0) ** beta


def construct_clique(
    graph: ConflictGraph, tau: np.ndarray, alpha: float, rng: np.random.Generator
) -> tuple[int, ...]:
    """One ant's maximal clique under pheromone ``tau``."""
    V = len(graph)
    if V == 0:
        raise ValueError("cannot construct a clique on an empty graph")
    attract = np.asarray(tau, dtype=float) ** alpha
    buf = np.empty(V, np.int64)
    size = _construct(graph.adjacency, attract, rng, buf, np.empty(V, np.int64))
    return tuple(int(i) for i in buf[:size])


def update_pheromones(
    tau: np.ndarray,
    best_clique,
    best_weight: float,
    iter_weight: float,
    rho: float,
    tau_min: float,
    tau_max: float,
) -> np.ndarray:
    """Evaporate, reward the best clique with 1/(1 + gap), clamp.  Returns a new array."""
    if best_weight < iter_weight:
        raise ValueError("best clique weight must dominate the iteration best")
    out = np.array(tau, dtype=float)
    best = np.asarray(list(best_clique), dtype=np.int64)
    _update(out, best, len(best), float(best_weight), float(iter_weight), rho, tau_min, tau_max)
    return out


def solve(
    graph: ConflictGraph,
    params: AcoParams | None = None,
    target_weight: float | None = None,
) -> AcoResult:
    """Run the colony for ``params.max_iterations`` iterations.

    ``target_weight`` (e.g. a known optimum) stops the run once reached.
    """
    params = AcoParams() if params is None else params
    check_graph(graph)
    V = len(graph)
    if V == 0:
        return AcoResult((), 0.0, 0, np.zeros(0), np.zeros(0), np.zeros((0, 2)))
    rng = np.random.default_rng(params.rng_seed)
    tau = np.full(V, params.tau_max)
    target = np.inf if target_weight is None else float(target_weight) - 1e-12
    clique, weight, used, trace, tau_range = _run(
        np.ascontiguousarray(graph.adjacency),
        np.ascontiguousarray(graph.weights),
        _attractiveness_base(graph, params.beta),
        tau,
        float(params.alpha),
        float(params.rho),
        float(params.tau_min),
        float(params.tau_max),
        int(params.nb_ants),
        int(params.max_iterations),
        target,
        rng,
    )
    if used == 0:
        return AcoResult((), 0.0, 0, trace, tau, tau_range)
    clique = tuple(sorted(int(i) for i in clique))
    return AcoResult(
        clique=clique,
        total_weight=graph.clique_weight(clique),
        iterations_used=int(used),
        weight_trace=trace,
        pheromone=tau,
        pheromone_range=tau_range,
    )
