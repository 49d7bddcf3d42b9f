"""Joint mode, relay and subcarrier scheduling for OFDMA relay networks
carrying bidirectional traffic."""

__version__ = "0.1.0"

from .aco import AcoParams, AcoResult
from .allocation import Allocation, Session, Violation, check_allocation
from .baselines import (
    BenchmarkScheme,
    SchemeResult,
    run_scheme,
    solve_bm1,
    solve_bm2,
    solve_proposed,
    solve_suboptimal,
)
from .channel import (
    ChannelRealization,
    GeometryMode,
    NodeLayout,
    RelayStrategy,
    ScenarioConfig,
    draw_scenario,
    generate_channel,
    generate_layout,
)
from .estimators import AntColonyClique, BranchAndBoundClique, ProposedScheduler
from .exact import GraphTooLargeError, solve_exact, solve_p1_bruteforce
from .experiments import ExperimentSpec, ResultRow, SweepKind, run_experiment, run_toy, summarize
from .graph import ConflictGraph, SolveResult, Vertex, build_graph, clique_to_allocation
from .rates import ModeTag, RatePair, TransmissionMode, session_rate

__all__ = [
    "AcoParams", "AcoResult", "Allocation", "AntColonyClique", "BenchmarkScheme",
    "BranchAndBoundClique", "ChannelRealization", "ConflictGraph", "ExperimentSpec",
    "GeometryMode", "GraphTooLargeError", "ModeTag", "NodeLayout", "ProposedScheduler",
    "RatePair", "RelayStrategy", "ResultRow", "ScenarioConfig", "SchemeResult", "Session",
    "SolveResult", "SweepKind", "TransmissionMode", "Vertex", "Violation", "build_graph",
    "check_allocation", "clique_to_allocation", "draw_scenario", "generate_channel",
    "generate_layout", "run_experiment", "run_scheme", "run_toy", "session_rate",
    "solve_bm1", "solve_bm2", "solve_exact", "solve_p1_bruteforce", "solve_proposed",
    "solve_suboptimal", "summarize",
]
