"""Monte-Carlo sweeps, the toy walkthrough and result summaries.

Every realization index ``i`` maps to the integer seed ``base_seed + i``.
The layout and channel are drawn from that seed alone, so all schemes, all
relay strategies and all power points see the same draw (common random
numbers), and ``relaysched solve --seed`` replays any single row.
"""
from __future__ import annotations

import enum
import io
import math
import time
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from . import aco
from .allocation import Allocation, check_allocation
from .baselines import BenchmarkScheme, SchemeResult, run_scheme
from .channel import ChannelRealization, GeometryMode, NodeLayout, RelayStrategy, ScenarioConfig, draw_scenario
from .exact import DEFAULT_MAX_VERTICES
from .fileio import write_csv
from .graph import ConflictGraph, build_graph, clique_to_allocation


class SweepKind(str, enum.Enum):
    NONE = "none"
    POWER_DB = "power-db"
    RELAY_RADIUS_RATIO = "relay-radius-ratio"


@dataclass(frozen=True)
class ExperimentSpec:
    scenario: ScenarioConfig = field(default_factory=ScenarioConfig)
    schemes: tuple[BenchmarkScheme, ...] = (BenchmarkScheme.PROPOSED, BenchmarkScheme.BM1)
    strategies: tuple[RelayStrategy, ...] = (RelayStrategy.DF_XOR,)
    sweep: SweepKind = SweepKind.NONE
    sweep_values: tuple[float, ...] = ()
    num_realizations: int = 200
    base_seed: int = 0
    aco_params: aco.AcoParams = field(default_factory=aco.AcoParams)
    max_vertices: int = DEFAULT_MAX_VERTICES

    def __post_init__(self):
        object.__setattr__(self, "schemes", tuple(BenchmarkScheme(s) for s in self.schemes))
        object.__setattr__(self, "strategies", tuple(RelayStrategy(s) for s in self.strategies))
        object.__setattr__(self, "sweep", SweepKind(self.sweep))
        object.__setattr__(self, "sweep_values", tuple(float(v) for v in self.sweep_values))
        if self.num_realizations < 1:
            raise ValueError("num_realizations must be >= 1")
        if not self.schemes or not self.strategies:
            raise ValueError("schemes and strategies must be non-empty")
        if self.sweep is not SweepKind.NONE and not self.sweep_values:
            raise ValueError("a sweep needs at least one value")

    @property
    def points(self) -> tuple[float | None, ...]:
        return (None,) if self.sweep is SweepKind.NONE else self.sweep_values

    def scenario_at(self, value: float | None) -> ScenarioConfig:
        if self.sweep is SweepKind.POWER_DB:
            return self.scenario.with_bs_power(value)
        if self.sweep is SweepKind.RELAY_RADIUS_RATIO:
            return self.scenario.replace(rs_radius_ratio=value)
        return self.scenario


@dataclass(frozen=True)
class ResultRow:
    sweep_value: float | None
    scheme: str
    strategy: str
    realization: int
    seed: int
    throughput: float
    solve_time: float = 0.0
    error: str = ""

    def __post_init__(self):
        if not self.error and not self.throughput >= 0:
            raise ValueError(f"throughput must be non-negative, got {self.throughput}")

    @property
    def ok(self) -> bool:
        return not self.error


def realization_seed(base_seed: int, index: int) -> int:
    return base_seed + index


def evaluate(
    scheme: BenchmarkScheme,
    real: ChannelRealization,
    cfg: ScenarioConfig,
    layout: NodeLayout,
    seed: int,
    aco_params: aco.AcoParams | None = None,
    max_vertices: int = DEFAULT_MAX_VERTICES,
) -> SchemeResult:
    """Run one scheme and check its schedule before trusting the throughput."""
    res = run_scheme(scheme, real, cfg, layout, seed, aco_params, max_vertices)
    bad = check_allocation(res.allocation, real.num_subcarriers)
    if bad is not None:
        raise RuntimeError(f"{scheme.value} produced an invalid schedule: {bad}")
    return res


def run_experiment(spec: ExperimentSpec, progress=None) -> list[ResultRow]:
    """Evaluate every scheme and strategy on every (sweep value, realization).

    Solver failures become rows with ``error`` set and the run continues.
    ``progress`` is an optional callable receiving each finished row.
    """
    rows = []
    needs_layout_redraw = spec.sweep is SweepKind.RELAY_RADIUS_RATIO
    for i in range(spec.num_realizations):
        seed = realization_seed(spec.base_seed, i)
        base = None if needs_layout_redraw else draw_scenario(spec.scenario, seed)
        for value in spec.points:
            cfg_v = spec.scenario_at(value)
            if base is None:
                layout, real = draw_scenario(cfg_v, seed)
            else:
                layout, real = base[0], base[1].with_powers(cfg_v.power_bs_db, cfg_v.power_rs_db, cfg_v.power_ms_db)
            for strategy in spec.strategies:
                cfg_s = cfg_v.replace(relay_strategy=strategy)
                for scheme in spec.schemes:
                    t0 = time.perf_counter()
                    try:
                        res = evaluate(scheme, real, cfg_s, layout, seed, spec.aco_params, spec.max_vertices)
                        tp, err = res.throughput, ""
                    except Exception as exc:  # recorded, not raised
                        tp, err = math.nan, f"{type(exc).__name__}: {exc}"
                    row = ResultRow(value, scheme.value, strategy.value, i, seed, tp, time.perf_counter() - t0, err)
                    rows.append(row)
                    if progress is not None:
                        progress(row)
    return rows


@dataclass(frozen=True)
class Summary:
    sweep_value: float | None
    scheme: str
    strategy: str
    count: int
    mean: float
    stderr: float


def summarize(rows: list[ResultRow]) -> list[Summary]:
    """Mean and standard error per (sweep value, scheme, strategy); error rows skipped."""
    groups: dict[tuple, list[float]] = defaultdict(list)
    for r in rows:
        if r.ok:
            groups[(r.sweep_value, r.scheme, r.strategy)].append(r.throughput)
    out = []
    for (value, scheme, strategy), vals in groups.items():
        arr = np.asarray(vals)
        stderr = float(arr.std(ddof=1) / math.sqrt(len(arr))) if len(arr) > 1 else 0.0
        out.append(Summary(value, scheme, strategy, len(arr), float(arr.mean()), stderr))
    return out


def summary_table(rows: list[ResultRow]) -> dict[tuple, Summary]:
    return {(s.sweep_value, s.scheme, s.strategy): s for s in summarize(rows)}


ROW_FIELDS = ["sweep_value", "scheme", "strategy", "realization", "seed", "throughput", "error"]


def rows_to_csv(rows: list[ResultRow], path_or_buf=None, include_timing: bool = False) -> str | None:
    """Write result rows as CSV.

    Timing is left out unless asked for, so reruns produce identical bytes.
    Returns the text when no destination is given.
    """
    fields = ROW_FIELDS + (["solve_time"] if include_timing else [])
    dicts = [
        {
            "sweep_value": "" if r.sweep_value is None else r.sweep_value,
            "scheme": r.scheme,
            "strategy": r.strategy,
            "realization": r.realization,
            "seed": r.seed,
            "throughput": r.throughput,
            "error": r.error,
            "solve_time": r.solve_time,
        }
        for r in rows
    ]
    if path_or_buf is None:
        buf = io.StringIO()
        write_csv(dicts, buf, fields)
        return buf.getvalue()
    write_csv(dicts, path_or_buf, fields)
    return None


def summary_to_csv(summaries: list[Summary], path_or_buf=None) -> str | None:
    dicts = [
        {
            "sweep_value": "" if s.sweep_value is None else s.sweep_value,
            "scheme": s.scheme,
            "strategy": s.strategy,
            "count": s.count,
            "mean": s.mean,
            "stderr": s.stderr,
        }
        for s in summaries
    ]
    fields = ["sweep_value", "scheme", "strategy", "count", "mean", "stderr"]
    if path_or_buf is None:
        buf = io.StringIO()
        write_csv(dicts, buf, fields)
        return buf.getvalue()
    write_csv(dicts, path_or_buf, fields)
    return None


TOY_SCENARIO = ScenarioConfig(
    num_ms=1,
    num_rs=2,
    num_subcarriers=4,
    cell_radius=10.0,
    geometry_mode=GeometryMode.NORMALIZED_PLANE,
    bs_position=(0.0, 0.0),
    ms_positions=((10.0, 0.0),),
    rs_positions=((4.0, 3.0), (4.0, -3.0)),
    relay_strategy=RelayStrategy.DF_XOR,
).with_bs_power(10.0)


@dataclass(frozen=True)
class ToyResult:
    graph: ConflictGraph
    clique: tuple[int, ...]
    allocation: Allocation
    grid: str


def run_toy(seed: int = 0, cfg: ScenarioConfig = TOY_SCENARIO, aco_params: aco.AcoParams | None = None) -> ToyResult:
    """Single MS, two relays, four subcarriers, solved by the colony."""
    _, real = draw_scenario(cfg, seed)
    graph = build_graph(real, cfg)
    params = aco_params or aco.AcoParams(rng_seed=seed)
    res = aco.solve(graph, params)
    alloc = clique_to_allocation(graph, res.clique)
    return ToyResult(graph, res.clique, alloc, render_grid(alloc, real.num_subcarriers))


def render_grid(alloc: Allocation, num_subcarriers: int) -> str:
    """Slots as rows, subcarriers as columns; a cell shows session number and mode.

    Sessions and subcarriers are numbered from 1 for display.
    """
    tags = [f"{i + 1}{s.mode_letter}" for i, s in enumerate(alloc.sessions)]
    width = max([5] + [len(tag) + 1 for tag in tags])
    header = "slot".ljust(6) + "".join(f"n{n + 1}".rjust(width) for n in range(num_subcarriers))
    lines = [header]
    for t in range(alloc.num_slots):
        occ = alloc.occupancy(t)
        cells = []
        for n in range(num_subcarriers):
            i = occ.get(n)
            cells.append(("." if i is None else tags[i]).rjust(width))
        lines.append(f"t{t + 1}".ljust(6) + "".join(cells))
    return "\n".join(lines)


def describe_clique(graph: ConflictGraph, clique) -> list[str]:
    """One line per clique member: vertex, MS, mode, relays and weight (1-based ids)."""
    out = []
    for i in clique:
        lab = graph.labels[i] if graph.labels else None
        if lab is None:
            out.append(f"{graph.vertices[i]}  weight={graph.weights[i]:.4f}")
            continue
        relays = ",".join(f"RS{r + 1}" for r in lab.relays) or "-"
        out.append(
            f"{graph.vertices[i]}  MS{lab.ms + 1}  mode={getattr(lab.mode, 'tag', lab.mode).value}"
            f"  relays={relays}  weight={lab.weight:.4f}"
        )
    return out
