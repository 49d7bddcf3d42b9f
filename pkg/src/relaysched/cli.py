"""Command-line entry point: ``relaysched <command>``."""
from __future__ import annotations

import io
import sys

import click
import numpy as np

from . import __version__, aco
from .baselines import BenchmarkScheme
from .channel import RelayStrategy, ScenarioConfig, db_to_linear, draw_scenario
from .exact import DEFAULT_MAX_VERTICES, solve_exact
from .experiments import (
    TOY_SCENARIO,
    ExperimentSpec,
    SweepKind,
    describe_clique,
    evaluate,
    render_grid,
    rows_to_csv,
    run_experiment,
    run_toy,
    summarize,
    summary_to_csv,
)
from .fileio import export_graph, layout_rows, load_config, load_graph, realization_rows, write_csv
from .graph import build_graph
from .rates import ModeTag, rate_mode_a, rate_mode_b, rate_mode_c, rate_mode_d, rate_mode_e

STRATEGIES = [s.value for s in RelayStrategy]
SCHEMES = [s.value for s in BenchmarkScheme]


def _float_list(text: str) -> list[float]:
    try:
        return [float(x) for x in text.replace(";", ",").split(",") if x.strip()]
    except ValueError as exc:
        raise click.BadParameter(f"expected comma-separated numbers, got {text!r}") from exc


def _scenario(config_path, strategy) -> tuple[ScenarioConfig, dict]:
    if config_path is None:
        cfg, extra = ScenarioConfig(), {}
    else:
        try:
            cfg, extra = load_config(config_path)
        except (KeyError, ValueError) as exc:
            raise click.ClickException(f"{config_path}: {exc}") from exc
    if strategy is not None:
        cfg = cfg.replace(relay_strategy=strategy)
    return cfg, extra


def _emit(text: str, out):
    if out is None:
        click.echo(text, nl=False)
    else:
        with open(out, "w", newline="") as fh:
            fh.write(text)


def _aco_params(seed: int, ants: int | None, iterations: int | None) -> aco.AcoParams:
    base = aco.AcoParams(rng_seed=seed)
    kw = {}
    if ants is not None:
        kw["nb_ants"] = ants
    if iterations is not None:
        kw["max_iterations"] = iterations
    return aco.AcoParams(**{**base.__dict__, **kw})


config_option = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), help="Scenario key/value file.")
strategy_option = click.option("--strategy", type=click.Choice(STRATEGIES), default=None, help="Relay strategy (overrides the config).")
out_option = click.option("--out", type=click.Path(dir_okay=False, writable=True), default=None, help="CSV destination (stdout if omitted).")


@click.group()
@click.version_option(version=__version__, prog_name="relaysched")
def main():
    """Scheduling for OFDMA relay networks with bidirectional traffic."""


@main.command()
@click.option("--seed", type=int, default=0, show_default=True)
@strategy_option
def toy(seed, strategy):
    """Single-MS, two-relay, four-subcarrier walkthrough."""
    cfg = TOY_SCENARIO if strategy is None else TOY_SCENARIO.replace(relay_strategy=strategy)
    res = run_toy(seed, cfg)
    click.echo(f"graph: {len(res.graph)} vertices, {res.graph.num_edges} edges")
    click.echo(f"clique ({len(res.clique)} vertices, weight {res.graph.clique_weight(res.clique):.4f}):")
    for line in describe_clique(res.graph, res.clique):
        click.echo("  " + line)
    click.echo(res.grid)


def _solve_graph_file(path, seed, ants, iterations, exact, out):
    graph = load_graph(path)
    if exact:
        res = solve_exact(graph, max_vertices=max(DEFAULT_MAX_VERTICES, len(graph)))
    else:
        res = aco.solve(graph, _aco_params(seed, ants, iterations))
    rows = [{"record": "clique", "index": i, "value": v} for i, v in enumerate(res.clique)]
    rows.append({"record": "weight", "index": "", "value": res.total_weight})
    rows += [{"record": "trace", "index": i, "value": float(w)} for i, w in enumerate(res.weight_trace)]
    buf = io.StringIO()
    write_csv(rows, buf, ["record", "index", "value"])
    _emit(buf.getvalue(), out)


@main.command()
@config_option
@click.option("--graph", "graph_path", type=click.Path(exists=True, dir_okay=False), help="Solve a graph file instead of a scenario.")
@click.option("--seed", type=int, default=0, show_default=True, help="Realization seed (also seeds the colony).")
@click.option("--scheme", "schemes", type=click.Choice(SCHEMES), multiple=True, help="Scheme(s) to run; default proposed.")
@strategy_option
@click.option("--ants", type=int, default=None, help="Override the number of ants.")
@click.option("--iterations", type=int, default=None, help="Override the iteration budget.")
@click.option("--exact", is_flag=True, help="With --graph: use branch and bound.")
@click.option("--grid/--no-grid", default=False, help="Print the time-frequency grid to stderr.")
@out_option
def solve(config_path, graph_path, seed, schemes, strategy, ants, iterations, exact, grid, out):
    """Schedule one seeded realization, or solve a graph file."""
    if graph_path is not None:
        _solve_graph_file(graph_path, seed, ants, iterations, exact, out)
        return
    cfg, _ = _scenario(config_path, strategy)
    layout, real = draw_scenario(cfg, seed)
    params = _aco_params(seed, ants, iterations)
    rows, failed = [], False
    for scheme in schemes or (BenchmarkScheme.PROPOSED.value,):
        try:
            res = evaluate(BenchmarkScheme(scheme), real, cfg, layout, seed, params)
        except Exception as exc:
            failed = True
            rows.append({"seed": seed, "scheme": scheme, "strategy": cfg.relay_strategy.value, "throughput": "", "error": f"{type(exc).__name__}: {exc}"})
            continue
        rows.append({"seed": seed, "scheme": scheme, "strategy": cfg.relay_strategy.value, "throughput": res.throughput, "error": ""})
        if grid:
            click.echo(f"[{scheme}]", err=True)
            click.echo(render_grid(res.allocation, real.num_subcarriers), err=True)
    buf = io.StringIO()
    write_csv(rows, buf, ["seed", "scheme", "strategy", "throughput", "error"])
    _emit(buf.getvalue(), out)
    if failed:
        sys.exit(1)


def _sweep(kind, values, config_path, strategies, schemes, realizations, base_seed, ants, iterations, summary_out, timing, out, quiet):
    cfg, extra = _scenario(config_path, None)
    strategies = strategies or extra.get("strategies") or [cfg.relay_strategy.value]
    schemes = schemes or extra.get("schemes") or [s.value for s in BenchmarkScheme if s is not BenchmarkScheme.PROPOSED_EXACT]
    realizations = realizations or extra.get("num_realizations", 200)
    base_seed = extra.get("base_seed", 0) if base_seed is None else base_seed
    try:
        spec = ExperimentSpec(
            scenario=cfg,
            schemes=tuple(schemes),
            strategies=tuple(strategies),
            sweep=kind,
            sweep_values=tuple(values),
            num_realizations=realizations,
            base_seed=base_seed,
            aco_params=_aco_params(0, ants, iterations),
        )
    except ValueError as exc:
        raise click.ClickException(str(exc)) from exc
    total = len(spec.points) * realizations * len(spec.schemes) * len(spec.strategies)
    done = [0]

    def progress(row):
        done[0] += 1
        if not quiet and (done[0] % 50 == 0 or done[0] == total):
            click.echo(f"{done[0]}/{total} rows", err=True)

    rows = run_experiment(spec, progress)
    _emit(rows_to_csv(rows, include_timing=timing), out)
    if summary_out:
        summary_to_csv(summarize(rows), summary_out)
    errors = [r for r in rows if not r.ok]
    for r in errors:
        click.echo(f"error: value={r.sweep_value} seed={r.seed} {r.scheme}: {r.error}", err=True)
    if errors:
        sys.exit(1)


def sweep_options(f):
    f = out_option(f)
    f = click.option("--quiet", is_flag=True, help="No progress on stderr.")(f)
    f = click.option("--timing", is_flag=True, help="Add a solve_time column (makes output run-dependent).")(f)
    f = click.option("--summary-out", type=click.Path(dir_okay=False), default=None, help="Also write mean/stderr per group.")(f)
    f = click.option("--iterations", type=int, default=None)(f)
    f = click.option("--ants", type=int, default=None)(f)
    f = click.option("--base-seed", type=int, default=None)(f)
    f = click.option("--realizations", type=int, default=None, help="Default: config value or 200.")(f)
    f = click.option("--scheme", "schemes", type=click.Choice(SCHEMES), multiple=True)(f)
    f = click.option("--strategy", "strategies", type=click.Choice(STRATEGIES), multiple=True)(f)
    return config_option(f)


@main.command("sweep-power")
@click.option("--powers", required=True, help="BS per-subcarrier powers in dB, comma separated.")
@sweep_options
def sweep_power(powers, **kw):
    """Throughput versus BS power for each scheme."""
    _sweep(SweepKind.POWER_DB, _float_list(powers), **kw)


@main.command("sweep-relay-radius")
@click.option("--ratios", required=True, help="RS circle radius over cell radius, comma separated.")
@sweep_options
def sweep_relay_radius(ratios, **kw):
    """Throughput versus relay circle radius for each scheme."""
    _sweep(SweepKind.RELAY_RADIUS_RATIO, _float_list(ratios), **kw)


@main.command("export-graph")
@config_option
@click.option("--seed", type=int, default=0, show_default=True)
@strategy_option
@click.option("--layout-out", type=click.Path(dir_okay=False), default=None, help="Also dump node positions as CSV.")
@click.option("--channel-out", type=click.Path(dir_okay=False), default=None, help="Also dump per-link, per-subcarrier gains as CSV.")
@click.option("--out", type=click.Path(dir_okay=False), default=None, help="Graph file (stdout if omitted).")
def export_graph_cmd(config_path, seed, strategy, layout_out, channel_out, out):
    """Write the conflict graph of one realization in the plain-text graph format."""
    cfg, _ = _scenario(config_path, strategy)
    layout, real = draw_scenario(cfg, seed)
    _emit(export_graph(build_graph(real, cfg)), out)
    if layout_out:
        write_csv(layout_rows(layout), layout_out)
    if channel_out:
        write_csv(realization_rows(real), channel_out)


_MODE_INPUTS = {
    "a": ("bm", "mb"),
    "b": ("bm", "mr", "rb"),
    "c": ("br", "rm", "mb"),
    "d": ("br1", "r1m", "mr2", "r2b", "r2m", "r1b"),
    "e": ("br", "mr", "rb", "rm"),
}


@main.command()
@click.option("--mode", type=click.Choice([t.value for t in ModeTag]), required=True)
@click.option("--strategy", type=click.Choice(STRATEGIES), default="df-xor", show_default=True)
@click.option("--snr", "snrs", multiple=True, metavar="NAME=VALUE", help="Linear SNR of a hop, e.g. bm=10.  Repeat per hop.")
@click.option("--db", is_flag=True, help="Interpret SNR values in dB.")
@click.option("--p-rs-db", type=float, default=7.0, show_default=True, help="Relay power (mode e AF scaling).")
@click.option("--xi", type=float, default=0.5, show_default=True)
@click.option("--theta", type=float, default=0.5, show_default=True)
def rates(mode, strategy, snrs, db, p_rs_db, xi, theta):
    """Evaluate one mode's downlink/uplink rates from explicit hop SNRs.

    \b
    a: bm mb          b: bm mr rb       c: br rm mb
    d: br1 r1m mr2 r2b r2m r1b          e: br mr rb rm
    """
    values = {}
    for item in snrs:
        name, sep, val = item.partition("=")
        if not sep:
            raise click.BadParameter(f"expected NAME=VALUE, got {item!r}", param_hint="--snr")
        values[name.strip().lower()] = float(db_to_linear(float(val))) if db else float(val)
    need = _MODE_INPUTS[mode]
    missing = [n for n in need if n not in values]
    extra = sorted(set(values) - set(need))
    if missing or extra:
        raise click.UsageError(f"mode {mode} needs SNRs {', '.join(need)}; missing {missing}, unexpected {extra}")
    args = [values[n] for n in need]
    if mode == "a":
        pair = rate_mode_a(*args)
    elif mode == "b":
        pair = rate_mode_b(*args, strategy)
    elif mode == "c":
        pair = rate_mode_c(*args, strategy)
    elif mode == "d":
        pair = rate_mode_d(*args, strategy)
    else:
        p_rs = float(db_to_linear(p_rs_db))
        br, mr, rb, rm = args
        pair = rate_mode_e(br, mr, rb, rm, rm / p_rs, rb / p_rs, p_rs, strategy, xi, theta)
    click.echo("mode,strategy,r_down,r_up,total")
    down, up = float(np.asarray(pair.r_down)), float(np.asarray(pair.r_up))
    click.echo(f"{mode},{strategy},{down!r},{up!r},{down + up!r}")


if __name__ == "__main__":
    main()
