"""Plain-text formats: scenario config, channel dumps and graph files.

Config files are ``key = value`` lines (``#`` comments allowed) whose keys
are :class:`ScenarioConfig` fields plus a few experiment keys.  Positions are
written as ``x,y`` with ``;`` between points.

Graph files::

    # any comment
    p <num_vertices> <num_edges>
    v <id> <weight> <slot subcarriers joined by ','; '-' for unused> <label>
    e <i> <j>

Vertex ids and subcarriers are 0-based; the label is free text describing
the best (MS, mode, relays) choice.
"""
from __future__ import annotations

import configparser
import csv
import dataclasses
import io
from pathlib import Path

import numpy as np

from .channel import ChannelRealization, GeometryMode, NodeLayout, RelayStrategy, ScenarioConfig
from .graph import ConflictGraph, Vertex, VertexLabel

_SECTION = "scenario"
EXPERIMENT_KEYS = {
    "num_realizations": int,
    "base_seed": int,
    "schemes": lambda s: [x.strip() for x in s.split(",") if x.strip()],
    "strategies": lambda s: [x.strip() for x in s.split(",") if x.strip()],
}


def _parse_bool(text: str) -> bool:
    low = text.strip().lower()
    if low in ("1", "true", "yes", "on"):
        return True
    if low in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _parse_points(text: str) -> tuple[tuple[float, float], ...]:
    points = []
    for chunk in text.split(";"):
        if not chunk.strip():
            continue
        x, y = (float(c) for c in chunk.split(","))
        points.append((x, y))
    return tuple(points)


def _field_parser(f: dataclasses.Field):
    name = f.name
    if name in ("rs_positions", "ms_positions"):
        return _parse_points
    if name == "bs_position":
        return lambda s: _parse_points(s)[0]
    if name == "relay_strategy":
        return lambda s: RelayStrategy(s.strip().lower())
    if name == "geometry_mode":
        return lambda s: GeometryMode(s.strip().lower())
    if name == "small_scale_fading":
        return _parse_bool
    default = f.default
    if isinstance(default, bool):
        return _parse_bool
    if isinstance(default, int):
        return int
    return lambda s: None if s.strip().lower() == "none" else float(s)


_PARSERS = {f.name: _field_parser(f) for f in dataclasses.fields(ScenarioConfig)}


def parse_config(text: str) -> tuple[ScenarioConfig, dict]:
    """Parse config text into a scenario and a dict of experiment settings.

    Unknown keys raise ``KeyError`` so typos do not pass silently.
    """
    parser = configparser.ConfigParser(inline_comment_prefixes=("#",), interpolation=None)
    parser.optionxform = str
    parser.read_string(f"[{_SECTION}]\n" + text)
    scenario, extra = {}, {}
    for key, raw in parser[_SECTION].items():
        key = key.strip().replace("-", "_")
        if key in _PARSERS:
            scenario[key] = _PARSERS[key](raw)
        elif key in EXPERIMENT_KEYS:
            extra[key] = EXPERIMENT_KEYS[key](raw)
        else:
            raise KeyError(f"unknown config key {key!r}")
    return ScenarioConfig(**scenario), extra


def load_config(path) -> tuple[ScenarioConfig, dict]:
    return parse_config(Path(path).read_text())


def _format_value(value) -> str:
    if isinstance(value, (RelayStrategy, GeometryMode)):
        return value.value
    if value and isinstance(value, tuple) and isinstance(value[0], tuple):
        return "; ".join(f"{x!r},{y!r}" for x, y in value)
    if isinstance(value, tuple):
        return ";".join(",".join(repr(c) for c in value[i:i + 2]) for i in range(0, len(value), 2))
    return repr(value) if isinstance(value, float) else str(value)


def dump_config(cfg: ScenarioConfig) -> str:
    """Render a scenario in the key/value format, round-trippable by :func:`parse_config`."""
    lines = []
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if f.name in ("rs_positions", "ms_positions") and not value:
            continue
        lines.append(f"{f.name} = {_format_value(value)}")
    return "\n".join(lines) + "\n"


def layout_rows(layout: NodeLayout) -> list[dict]:
    rows = [{"node": "BS", "x": layout.bs_position[0], "y": layout.bs_position[1]}]
    rows += [{"node": f"RS{r}", "x": p[0], "y": p[1]} for r, p in enumerate(layout.rs_positions)]
    rows += [{"node": f"MS{k}", "x": p[0], "y": p[1]} for k, p in enumerate(layout.ms_positions)]
    return rows


def realization_rows(real: ChannelRealization) -> list[dict]:
    """One row per (undirected link, subcarrier) with the gain and both SNRs."""
    rows = []

    def emit(a, b, gains, snr_ab, snr_ba):
        for n, g in enumerate(gains):
            rows.append({"a": a, "b": b, "subcarrier": n, "gain": g, "snr_ab": snr_ab[n], "snr_ba": snr_ba[n]})

    for k in range(real.num_ms):
        emit("BS", f"MS{k}", real.gain_bm[k], real.snr_bm[k], real.snr_mb[k])
    for r in range(real.num_rs):
        emit("BS", f"RS{r}", real.gain_br[r], real.snr_br[r], real.snr_rb[r])
    for k in range(real.num_ms):
        for r in range(real.num_rs):
            emit(f"MS{k}", f"RS{r}", real.gain_mr[k, r], real.snr_mr[k, r], real.snr_rm[k, r])
    return rows


def write_csv(rows: list[dict], path_or_buf, fieldnames=None):
    """Write dict rows with ``repr`` floats so values round-trip exactly."""
    if fieldnames is None:
        fieldnames = list(rows[0]) if rows else []
    own = isinstance(path_or_buf, (str, Path))
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        writer = csv.DictWriter(fh, fieldnames=fieldnames, lineterminator="\n", extrasaction="ignore")
        writer.writeheader()
        for row in rows:
            writer.writerow({k: repr(v) if isinstance(v, float) else v for k, v in row.items()})
    finally:
        if own:
            fh.close()


def _label_text(label: VertexLabel | None) -> str:
    if label is None:
        return "-"
    relays = ",".join(str(r) for r in label.relays) or "-"
    mode = getattr(label.mode, "tag", label.mode)
    mode = getattr(mode, "value", mode)
    return f"ms={label.ms};mode={mode};relays={relays}"


def export_graph(graph: ConflictGraph) -> str:
    buf = io.StringIO()
    buf.write(f"p {len(graph)} {graph.num_edges}\n")
    labels = graph.labels or (None,) * len(graph)
    for i, (v, w, lab) in enumerate(zip(graph.vertices, graph.weights, labels)):
        slots = ",".join("-" if n is None else str(n) for n in v.slots)
        buf.write(f"v {i} {float(w)!r} {slots} {_label_text(lab)}\n")
    rows, cols = np.nonzero(np.triu(graph.adjacency, k=1))
    for i, j in zip(rows.tolist(), cols.tolist()):
        buf.write(f"e {i} {j}\n")
    return buf.getvalue()


def import_graph(text: str) -> ConflictGraph:
    """Parse the export format; labels are not reconstructed."""
    n_vertices = None
    vertices, weights, edges = {}, {}, []
    for lineno, line in enumerate(text.splitlines(), 1):
        parts = line.split()
        if not parts or parts[0].startswith("#"):
            continue
        tag = parts[0]
        try:
            if tag == "p":
                n_vertices = int(parts[1])
            elif tag == "v":
                i = int(parts[1])
                weights[i] = float(parts[2])
                vertices[i] = Vertex(tuple(None if s == "-" else int(s) for s in parts[3].split(",")))
            elif tag == "e":
                edges.append((int(parts[1]), int(parts[2])))
            else:
                raise ValueError(f"unknown record {tag!r}")
        except (IndexError, ValueError) as exc:
            raise ValueError(f"line {lineno}: {exc}") from exc
    if n_vertices is None:
        raise ValueError("missing 'p' header line")
    if sorted(vertices) != list(range(n_vertices)):
        raise ValueError(f"expected vertex ids 0..{n_vertices - 1}")
    adj = np.zeros((n_vertices, n_vertices), dtype=bool)
    for i, j in edges:
        if i == j or not (0 <= i < n_vertices and 0 <= j < n_vertices):
            raise ValueError(f"bad edge ({i}, {j})")
        adj[i, j] = adj[j, i] = True
    return ConflictGraph(
        vertices=tuple(vertices[i] for i in range(n_vertices)),
        weights=np.array([weights[i] for i in range(n_vertices)]),
        adjacency=adj,
    )


def save_graph(graph: ConflictGraph, path):
    Path(path).write_text(export_graph(graph))


def load_graph(path) -> ConflictGraph:
    return import_graph(Path(path).read_text())
