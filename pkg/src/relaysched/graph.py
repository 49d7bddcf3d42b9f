"""Conflict graph: subcarrier pairs/tuples as vertices, slot-disjointness as edges.

A vertex is the tuple of subcarriers it occupies per time slot.  Its weight
is the best rate-pair sum any (MS, mode, relay) choice reaches on those
subcarriers, so a maximum weighted clique is an optimal schedule.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from .allocation import Allocation, Session
from .channel import ChannelRealization, RelayStrategy, ScenarioConfig
from .rates import (
    ModeTag,
    RatePair,
    TransmissionMode,
    rate_mode_a,
    rate_mode_b,
    rate_mode_c,
    rate_mode_d,
    rate_mode_e,
)

NO_ASSIGNMENT = -np.inf


@dataclass(frozen=True, order=True)
class Vertex:
    """Subcarrier occupied in each slot, ``None`` where the slot is unused."""

    slots: tuple[int | None, ...]

    def occupied(self, t: int) -> int | None:
        return self.slots[t]

    @property
    def is_direct(self) -> bool:
        return self.slots[-1] is None

    def __str__(self):
        return "(" + ",".join(str(n + 1) for n in self.slots if n is not None) + ")"


def direct_pair(n1: int, n2: int) -> Vertex:
    return Vertex((n1, n2, None))


def relay_tuple(n1: int, n2: int, n3: int) -> Vertex:
    return Vertex((n1, n2, n3))


def adjacent(u: Vertex, v: Vertex) -> bool:
    """Edge iff the two vertices use different subcarriers in every shared slot."""
    if u == v:
        return False
    return all(a is None or b is None or a != b for a, b in zip(u.slots, v.slots))


@dataclass(frozen=True)
class VertexLabel:
    ms: int
    mode: TransmissionMode | str
    weight: float
    rates: RatePair = RatePair(0.0, 0.0)
    relays: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.relays and isinstance(self.mode, TransmissionMode):
            object.__setattr__(self, "relays", self.mode.relays)


@dataclass(frozen=True)
class SolveResult:
    clique: tuple[int, ...]
    total_weight: float
    iterations_used: int = 0
    weight_trace: np.ndarray = field(default_factory=lambda: np.zeros(0))


@dataclass(frozen=True)
class ConflictGraph:
    vertices: tuple[Vertex, ...]
    weights: np.ndarray
    adjacency: np.ndarray
    labels: tuple[VertexLabel, ...] | None = None

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        adj = np.asarray(self.adjacency, dtype=bool)
        if adj.shape != (len(w), len(w)) or len(self.vertices) != len(w):
            raise ValueError("vertices, weights and adjacency sizes disagree")
        w.setflags(write=False)
        adj.setflags(write=False)
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "adjacency", adj)

    def __len__(self):
        return len(self.vertices)

    @property
    def num_edges(self) -> int:
        return int(np.count_nonzero(self.adjacency)) // 2

    @cached_property
    def occupancy(self) -> np.ndarray:
        return occupancy_matrix(self.vertices)

    def clique_weight(self, clique) -> float:
        return float(sum(self.weights[i] for i in clique))

    def is_clique(self, clique) -> bool:
        idx = np.asarray(list(clique), dtype=int)
        sub = self.adjacency[np.ix_(idx, idx)]
        return bool(np.all(sub | np.eye(len(idx), dtype=bool)))

    def is_maximal_clique(self, clique) -> bool:
        idx = list(clique)
        if not self.is_clique(idx):
            return False
        if not idx:
            return len(self) == 0
        common = np.all(self.adjacency[idx], axis=0)
        return not bool(np.any(common))

    def find_non_adjacent(self, clique) -> tuple[int, int] | None:
        idx = list(clique)
        for a, b in itertools.combinations(idx, 2):
            if not self.adjacency[a, b]:
                return a, b
        return None

    def subgraph(self, keep) -> ConflictGraph:
        keep = np.asarray(keep, dtype=int)
        return ConflictGraph(
            vertices=tuple(self.vertices[i] for i in keep),
            weights=self.weights[keep],
            adjacency=self.adjacency[np.ix_(keep, keep)],
            labels=None if self.labels is None else tuple(self.labels[i] for i in keep),
        )


def occupancy_matrix(vertices) -> np.ndarray:
    """(V, S) int matrix of occupied subcarriers, -1 where a slot is free."""
    if not vertices:
        return np.zeros((0, 0), dtype=np.int64)
    n_slots = len(vertices[0].slots)
    return np.array(
        [[-1 if n is None else n for n in v.slots] for v in vertices], dtype=np.int64
    ).reshape(len(vertices), n_slots)


def slot_disjoint_adjacency(occ: np.ndarray) -> np.ndarray:
    V = occ.shape[0]
    adj = np.ones((V, V), dtype=bool)
    for t in range(occ.shape[1]):
        col = occ[:, t]
        used = col >= 0
        clash = col[:, None] == col[None, :]
        clash &= used[:, None]
        clash &= used[None, :]
        adj &= ~clash
    np.fill_diagonal(adj, False)
    return adj


def enumerate_vertices(num_subcarriers: int) -> list[Vertex]:
    """All N^2 direct pairs, then all N^3 relay tuples, lexicographically."""
    if num_subcarriers < 1:
        raise ValueError("num_subcarriers must be >= 1")
    rng = range(num_subcarriers)
    direct = [direct_pair(a, b) for a, b in itertools.product(rng, rng)]
    relay = [relay_tuple(a, b, c) for a, b, c in itertools.product(rng, rng, rng)]
    return direct + relay


@lru_cache(maxsize=8)
def _full_structure(num_subcarriers: int):
    vertices = tuple(enumerate_vertices(num_subcarriers))
    occ = occupancy_matrix(vertices)
    adj = slot_disjoint_adjacency(occ)
    adj.setflags(write=False)
    occ.setflags(write=False)
    return vertices, occ, adj


@lru_cache(maxsize=64)
def relay_candidates(num_rs: int) -> tuple[TransmissionMode, ...]:
    """Per-MS relay-assisted candidates in (mode, relays) order: 3M + M(M-1) of them."""
    rs_ = range(num_rs)
    return (
        tuple(TransmissionMode(ModeTag.B, (r,)) for r in rs_)
        + tuple(TransmissionMode(ModeTag.C, (r,)) for r in rs_)
        + tuple(
            TransmissionMode(ModeTag.D, (r, rp)) for r in rs_ for rp in rs_ if r != rp
        )
        + tuple(TransmissionMode(ModeTag.E, (r,)) for r in rs_)
    )


MODE_A = TransmissionMode(ModeTag.A)


def direct_rates(real: ChannelRealization, n1, n2) -> RatePair:
    """Mode-a rates for every MS: arrays of shape (K, T)."""
    return rate_mode_a(real.snr_bm[:, n1], real.snr_mb[:, n2])


def relay_rates(
    real: ChannelRealization,
    n1,
    n2,
    n3,
    strategy: RelayStrategy,
    xi: float = 0.5,
    theta: float = 0.5,
) -> RatePair:
    """Rates of every (MS, relay candidate) on tuples (n1, n2, n3).

    Returns arrays of shape (K, C, T) with the candidate axis ordered as
    :func:`relay_candidates`.
    """
    n1, n2, n3 = (np.atleast_1d(np.asarray(x, dtype=int)) for x in (n1, n2, n3))
    K, M = real.num_ms, real.num_rs
    T = len(n1)
    if M == 0:
        empty = np.zeros((K, 0, T))
        return RatePair(empty, empty.copy())
    bm1 = real.snr_bm[:, n1]  # (K, T)
    mb2 = real.snr_mb[:, n2]
    br1 = real.snr_br[:, n1]  # (M, T)
    rb3 = real.snr_rb[:, n3]
    mr2 = real.snr_mr[:, :, n2]  # (K, M, T)
    rm3 = real.snr_rm[:, :, n3]

    b = rate_mode_b(bm1[:, None, :], mr2, rb3[None], strategy)
    c = rate_mode_c(br1[None], rm3, mb2[:, None, :], strategy)
    r_idx, rp_idx = np.nonzero(~np.eye(M, dtype=bool))  # row-major == lexicographic
    d = rate_mode_d(
        br1[r_idx][None],
        rm3[:, r_idx],
        mr2[:, rp_idx],
        rb3[rp_idx][None],
        rm3[:, rp_idx],
        rb3[r_idx][None],
        strategy,
    )
    e = rate_mode_e(
        br1[None],
        mr2,
        rb3[None],
        rm3,
        real.gain_mr[:, :, n3],
        real.gain_br[:, n3][None],
        real.p_rs,
        strategy,
        xi,
        theta,
    )
    downs, ups = [], []
    for block in (b, c, d, e):
        shape = (K, np.broadcast_shapes(np.shape(block.r_down), np.shape(block.r_up))[1], T)
        downs.append(np.broadcast_to(block.r_down, shape))
        ups.append(np.broadcast_to(block.r_up, shape))
    return RatePair(np.concatenate(downs, axis=1), np.concatenate(ups, axis=1))


def _argmax_labels(down, up, mask, index_to_mode):
    """Best flattened (k, candidate) per column; first index wins ties."""
    total = down + up
    if mask is not None:
        total = np.where(mask[..., None], total, NO_ASSIGNMENT)
    K, C, T = total.shape
    if C == 0:
        return np.full(T, NO_ASSIGNMENT), []
    flat = total.reshape(K * C, T)
    best = np.argmax(flat, axis=0)
    cols = np.arange(T)
    weights = flat[best, cols]
    d_best = down.reshape(K * C, T)[best, cols]
    u_best = up.reshape(K * C, T)[best, cols]
    labels = []
    for b, w, dn, upv in zip(best.tolist(), weights.tolist(), d_best.tolist(), u_best.tolist()):
        if w == NO_ASSIGNMENT:
            labels.append(None)
            continue
        k, c = divmod(b, C)
        labels.append(VertexLabel(k, index_to_mode(c), w, RatePair(dn, upv)))
    return weights, labels


def weigh_direct_pairs(real, n1, n2, ms_mask=None):
    n1 = np.atleast_1d(np.asarray(n1, dtype=int))
    n2 = np.atleast_1d(np.asarray(n2, dtype=int))
    pair = direct_rates(real, n1, n2)
    down = np.asarray(pair.r_down)[:, None, :]
    up = np.asarray(pair.r_up)[:, None, :]
    mask = None if ms_mask is None else np.asarray(ms_mask, dtype=bool)[:, None]
    return _argmax_labels(down, up, mask, lambda c: MODE_A)


def weigh_relay_tuples(real, n1, n2, n3, strategy, xi=0.5, theta=0.5, candidate_mask=None):
    pair = relay_rates(real, n1, n2, n3, strategy, xi, theta)
    cands = relay_candidates(real.num_rs)
    mask = None if candidate_mask is None else np.asarray(candidate_mask, dtype=bool)
    return _argmax_labels(pair.r_down, pair.r_up, mask, cands.__getitem__)


def weigh_direct(real: ChannelRealization, vertex: Vertex) -> VertexLabel:
    """Best MS for a direct pair (mode a)."""
    if not vertex.is_direct:
        raise ValueError(f"{vertex} is not a direct pair")
    _, labels = weigh_direct_pairs(real, vertex.slots[0], vertex.slots[1])
    return labels[0]


def weigh_relay(
    real: ChannelRealization,
    vertex: Vertex,
    strategy: RelayStrategy = RelayStrategy.DF_XOR,
    xi: float = 0.5,
    theta: float = 0.5,
) -> VertexLabel:
    """Best (MS, relay-assisted mode, relays) for a relay tuple.

    Returns a label with weight ``-inf`` when no relay exists.
    """
    if vertex.is_direct:
        raise ValueError(f"{vertex} is not a relay tuple")
    n1, n2, n3 = vertex.slots
    weights, labels = weigh_relay_tuples(real, n1, n2, n3, strategy, xi, theta)
    if not labels or labels[0] is None:
        return VertexLabel(-1, "none", NO_ASSIGNMENT)
    return labels[0]


def build_graph(
    real: ChannelRealization,
    cfg: ScenarioConfig | None = None,
    *,
    strategy: RelayStrategy | None = None,
    xi: float | None = None,
    theta: float | None = None,
    direct_mask=None,
    candidate_mask=None,
) -> ConflictGraph:
    """Weighted conflict graph of the three-slot protocol.

    ``direct_mask`` (K,) and ``candidate_mask`` (K, C) restrict which
    (MS, mode, relay) labels may be chosen; vertices left without any
    admissible label are dropped.
    """
    if cfg is not None:
        strategy = cfg.relay_strategy if strategy is None else strategy
        xi = cfg.xi if xi is None else xi
        theta = cfg.theta if theta is None else theta
    strategy = RelayStrategy.DF_XOR if strategy is None else RelayStrategy(strategy)
    xi = 0.5 if xi is None else xi
    theta = 0.5 if theta is None else theta

    N = real.num_subcarriers
    vertices, occ, adj = _full_structure(N)
    n_direct = N * N
    w_d, l_d = weigh_direct_pairs(real, occ[:n_direct, 0], occ[:n_direct, 1], direct_mask)
    w_r, l_r = weigh_relay_tuples(
        real, occ[n_direct:, 0], occ[n_direct:, 1], occ[n_direct:, 2],
        strategy, xi, theta, candidate_mask,
    )
    if len(w_r) == 0:
        w_r = np.full(N ** 3, NO_ASSIGNMENT)
        l_r = [None] * (N ** 3)
    weights = np.concatenate([w_d, w_r])
    labels = list(l_d) + list(l_r)
    keep = np.flatnonzero(np.isfinite(weights))
    if len(keep) == len(weights):
        return ConflictGraph(vertices, weights, adj, tuple(labels))
    return ConflictGraph(
        vertices=tuple(vertices[i] for i in keep),
        weights=weights[keep],
        adjacency=adj[np.ix_(keep, keep)],
        labels=tuple(labels[i] for i in keep),
    )


def clique_to_allocation(graph: ConflictGraph, clique) -> Allocation:
    """Interpret a clique as a schedule; raises on non-adjacent members."""
    clique = sorted(int(i) for i in clique)
    bad = graph.find_non_adjacent(clique)
    if bad is not None:
        a, b = bad
        raise ValueError(
            f"not a clique: vertices {a} {graph.vertices[a]} and {b} {graph.vertices[b]} are not adjacent"
        )
    if graph.labels is None and clique:
        raise ValueError("graph carries no labels; cannot map a clique to sessions")
    n_slots = len(graph.vertices[0].slots) if len(graph) else 3
    sessions = []
    for i in clique:
        lab = graph.labels[i]
        sessions.append(
            Session(
                ms=lab.ms,
                mode=lab.mode,
                subcarriers=graph.vertices[i].slots,
                rates=lab.rates,
                relays=lab.relays,
            )
        )
    return Allocation(num_slots=n_slots, sessions=sessions)
