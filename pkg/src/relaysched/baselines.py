"""Benchmark protocols and restricted schemes evaluated on one channel draw.

Frame structures:

* BM1: two-slot TDD without relays (slot 0 downlink, slot 1 uplink).
* BM2: four-slot TDD with one-way relaying; slots 0/1 are the downlink
  sub-slots and slots 2/3 the uplink sub-slots.
* Proposed and the two suboptimal schemes: the three-slot protocol.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import aco
from .allocation import Allocation, Session
from .channel import ChannelRealization, NodeLayout, RelayStrategy, ScenarioConfig
from .exact import DEFAULT_MAX_VERTICES, solve_exact
from .graph import (
    ConflictGraph,
    SolveResult,
    Vertex,
    VertexLabel,
    build_graph,
    clique_to_allocation,
    occupancy_matrix,
    relay_candidates,
    slot_disjoint_adjacency,
)
from .rates import ModeTag, RatePair, SessionSubcarriers, TransmissionMode, capacity, one_way_rate, session_rate

BM1_PRE_LOG = 1.0 / 2.0
BM2_PRE_LOG = 1.0 / 4.0
# "about the same" large-scale loss for the two relay hops
TWO_WAY_BAND_DB = 6.0


class BenchmarkScheme(str, enum.Enum):
    BM1 = "bm1"
    BM2 = "bm2"
    SUBOPTIMAL_ADAPTIVE = "suboptimal-adaptive"
    SUBOPTIMAL_RANDOM = "suboptimal-random"
    PROPOSED = "proposed"
    PROPOSED_EXACT = "proposed-exact"


@dataclass(frozen=True)
class SchemeResult:
    scheme: BenchmarkScheme
    throughput: float
    allocation: Allocation
    solve: SolveResult | None = None


def _solve_graph(graph: ConflictGraph, solver: str, aco_params: aco.AcoParams | None, max_vertices: int):
    if solver == "aco":
        return aco.solve(graph, aco_params)
    if solver == "exact":
        return solve_exact(graph, max_vertices=max_vertices)
    raise ValueError(f"unknown solver {solver!r}")


def solve_bm1(real: ChannelRealization) -> SchemeResult:
    """Greedy two-slot TDD: every subcarrier goes to the best MS in each direction."""
    dl_k = np.argmax(real.snr_bm, axis=0)
    ul_k = np.argmax(real.snr_mb, axis=0)
    sessions = []
    for n in range(real.num_subcarriers):
        k = int(dl_k[n])
        sessions.append(Session(k, "bm1-dl", (n, None), RatePair(BM1_PRE_LOG * float(capacity(real.snr_bm[k, n])), 0.0)))
    for n in range(real.num_subcarriers):
        k = int(ul_k[n])
        sessions.append(Session(k, "bm1-ul", (None, n), RatePair(0.0, BM1_PRE_LOG * float(capacity(real.snr_mb[k, n])))))
    alloc = Allocation(num_slots=2, sessions=sessions)
    return SchemeResult(BenchmarkScheme.BM1, alloc.throughput, alloc)


@lru_cache(maxsize=8)
def _bm2_structure(num_subcarriers: int, with_relay: bool):
    N = num_subcarriers
    vertices = [Vertex((n, None)) for n in range(N)]
    if with_relay:
        vertices += [Vertex((a, b)) for a, b in itertools.product(range(N), repeat=2)]
    vertices = tuple(vertices)
    adj = slot_disjoint_adjacency(occupancy_matrix(vertices))
    adj.setflags(write=False)
    return vertices, adj


def bm2_direction_graph(real: ChannelRealization, direction: str, strategy: RelayStrategy) -> ConflictGraph:
    """MWCP graph for one direction of the four-slot scheme.

    Direct vertex ``(n)`` uses subcarrier n in the first sub-slot only;
    relay vertex ``(n1, n2)`` uses n1 for the first hop and n2 for the second.
    """
    N, M = real.num_subcarriers, real.num_rs
    if direction == "dl":
        direct_snr = real.snr_bm  # (K, N)
        hop1 = real.snr_br[None, :, :, None]  # source -> RS on n1
        hop2 = real.snr_rm[:, :, None, :]  # RS -> destination on n2
    elif direction == "ul":
        direct_snr = real.snr_mb
        hop1 = real.snr_mr[:, :, :, None]
        hop2 = real.snr_rb[None, :, None, :]
    else:
        raise ValueError("direction must be 'dl' or 'ul'")
    vertices, adj = _bm2_structure(N, M > 0)
    best_k = np.argmax(direct_snr, axis=0)
    weights = list(BM2_PRE_LOG * capacity(direct_snr[best_k, np.arange(N)]))
    labels = [
        VertexLabel(int(best_k[n]), f"{direction}-direct", weights[n], _directional(direction, weights[n]))
        for n in range(N)
    ]
    if M > 0:
        rates = BM2_PRE_LOG * one_way_rate(hop1, hop2, strategy)  # (K, M, N1, N2)
        K = rates.shape[0]
        flat = rates.reshape(K * M, N * N)
        best = np.argmax(flat, axis=0)
        relay_w = flat[best, np.arange(N * N)]
        for idx, (b, w) in enumerate(zip(best.tolist(), relay_w.tolist())):
            k, r = divmod(b, M)
            weights.append(w)
            labels.append(VertexLabel(k, f"{direction}-relay", w, _directional(direction, w), (r,)))
    return ConflictGraph(vertices, np.array(weights), adj, tuple(labels))


def _directional(direction, rate):
    return RatePair(rate, 0.0) if direction == "dl" else RatePair(0.0, rate)


def solve_bm2(
    real: ChannelRealization,
    strategy: RelayStrategy = RelayStrategy.DF_XOR,
    solver: str = "aco",
    aco_params: aco.AcoParams | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> SchemeResult:
    """Four-slot one-way relaying, downlink and uplink solved independently."""
    sessions = []
    for direction, offset in (("dl", 0), ("ul", 2)):
        graph = bm2_direction_graph(real, direction, strategy)
        res = _solve_graph(graph, solver, aco_params, max_vertices)
        part = clique_to_allocation(graph, res.clique)
        for s in part.sessions:
            slots = [None] * 4
            slots[offset], slots[offset + 1] = s.subcarriers
            sessions.append(Session(s.ms, s.mode, tuple(slots), s.rates, s.relays))
    alloc = Allocation(num_slots=4, sessions=sessions)
    return SchemeResult(BenchmarkScheme.BM2, alloc.throughput, alloc)


def preassign_modes(
    cfg: ScenarioConfig,
    layout: NodeLayout,
    real: ChannelRealization,
    band_db: float = TWO_WAY_BAND_DB,
) -> list[TransmissionMode]:
    """Distance-based mode and relay choice per MS.

    Inside the RS circle: direct.  Outside: nearest RS, two-way relaying when
    the BS-RS and MS-RS large-scale gains are within ``band_db`` of each
    other, else direct downlink with one-way relayed uplink.
    """
    modes = []
    d_bs = layout.bs_ms_distance
    for k in range(real.num_ms):
        if real.num_rs == 0 or d_bs[k] < cfg.rs_circle_radius:
            modes.append(TransmissionMode(ModeTag.A))
            continue
        r = int(np.argmin(layout.ms_rs_distance[k]))
        if real.large_scale_br is not None:
            ls_br, ls_mr = real.large_scale_br[r], real.large_scale_mr[k, r]
        else:
            ls_br = np.mean(real.gain_br[r])
            ls_mr = np.mean(real.gain_mr[k, r])
        gap_db = abs(10 * np.log10(ls_br) - 10 * np.log10(ls_mr))
        tag = ModeTag.E if gap_db <= band_db else ModeTag.B
        modes.append(TransmissionMode(tag, (r,)))
    return modes


def _restriction_masks(modes, num_rs):
    cands = relay_candidates(num_rs)
    direct_mask = np.array([m.tag is ModeTag.A for m in modes])
    cand_mask = np.array([[c == m for c in cands] for m in modes], dtype=bool).reshape(len(modes), len(cands))
    return direct_mask, cand_mask


def solve_suboptimal(
    real: ChannelRealization,
    cfg: ScenarioConfig,
    layout: NodeLayout,
    subcarrier_policy: str = "adaptive",
    rng: np.random.Generator | None = None,
    solver: str = "aco",
    aco_params: aco.AcoParams | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    modes: list[TransmissionMode] | None = None,
) -> SchemeResult:
    if modes is None:
        modes = preassign_modes(cfg, layout, real)
    strategy = cfg.relay_strategy
    if subcarrier_policy == "adaptive":
        direct_mask, cand_mask = _restriction_masks(modes, real.num_rs)
        graph = build_graph(real, cfg, direct_mask=direct_mask, candidate_mask=cand_mask)
        res = _solve_graph(graph, solver, aco_params, max_vertices)
        alloc = clique_to_allocation(graph, res.clique)
        return SchemeResult(BenchmarkScheme.SUBOPTIMAL_ADAPTIVE, alloc.throughput, alloc, res)
    if subcarrier_policy != "random":
        raise ValueError(f"unknown subcarrier policy {subcarrier_policy!r}")
    rng = np.random.default_rng() if rng is None else rng
    N = real.num_subcarriers
    perms = [rng.permutation(N) for _ in range(3)]
    owners = rng.integers(0, real.num_ms, size=N)
    sessions = []
    for i in range(N):
        k = int(owners[i])
        mode = modes[k]
        n1, n2, n3 = (int(p[i]) for p in perms)
        sc = SessionSubcarriers(n1, n2, None if mode.tag is ModeTag.A else n3)
        rates = session_rate(real, k, mode, sc, strategy, cfg.xi, cfg.theta)
        sessions.append(Session(k, mode, (sc.n1, sc.n2, sc.n3), rates))
    alloc = Allocation(num_slots=3, sessions=sessions)
    return SchemeResult(BenchmarkScheme.SUBOPTIMAL_RANDOM, alloc.throughput, alloc)


def solve_proposed(
    real: ChannelRealization,
    cfg: ScenarioConfig,
    solver: str = "aco",
    aco_params: aco.AcoParams | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> SchemeResult:
    graph = build_graph(real, cfg)
    res = _solve_graph(graph, solver, aco_params, max_vertices)
    alloc = clique_to_allocation(graph, res.clique)
    scheme = BenchmarkScheme.PROPOSED if solver == "aco" else BenchmarkScheme.PROPOSED_EXACT
    return SchemeResult(scheme, alloc.throughput, alloc, res)


def run_scheme(
    scheme: BenchmarkScheme | str,
    real: ChannelRealization,
    cfg: ScenarioConfig,
    layout: NodeLayout,
    seed: int = 0,
    aco_params: aco.AcoParams | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> SchemeResult:
    """Dispatch one scheme; ``seed`` drives ACO and the random policy."""
    scheme = BenchmarkScheme(scheme)
    params = aco.AcoParams() if aco_params is None else aco_params
    params = aco.AcoParams(**{**params.__dict__, "rng_seed": seed})
    if scheme is BenchmarkScheme.BM1:
        return solve_bm1(real)
    if scheme is BenchmarkScheme.BM2:
        return solve_bm2(real, cfg.relay_strategy, aco_params=params)
    if scheme is BenchmarkScheme.SUBOPTIMAL_ADAPTIVE:
        return solve_suboptimal(real, cfg, layout, "adaptive", aco_params=params)
    if scheme is BenchmarkScheme.SUBOPTIMAL_RANDOM:
        return solve_suboptimal(real, cfg, layout, "random", rng=np.random.default_rng(seed))
    if scheme is BenchmarkScheme.PROPOSED:
        return solve_proposed(real, cfg, "aco", params)
    return solve_proposed(real, cfg, "exact", max_vertices=max_vertices)
