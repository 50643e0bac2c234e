"""Command-line scenario runner: optimize, sweep, resilience, casestudy.

Data goes to ``--out`` only; progress and diagnostics go to stderr.
Exit codes: 0 success, 1 input error, 2 no feasible constellation found.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import json
import logging
import sys
from pathlib import Path

import click

from . import casestudy as cs
from .config import ConfigError, ScenarioConfig, load_config
from .demands import Requirements
from .megareduce import SearchResult, search
from .orbits import TimeGrid
from .resilience import RANDOM, SOLAR_STORM, resilience_sweep
from .topology import build_snapshot

log = logging.getLogger("lsndesign")

EXIT_OK, EXIT_INPUT, EXIT_INFEASIBLE = 0, 1, 2
SWEEP_PARAMS = ("r_min", "capacity", "lambda", "altitude", "inclination")


class InputError(click.ClickException):
    exit_code = EXIT_INPUT


def _load(config: str, seed, slots, i_limit) -> ScenarioConfig:
    try:
        sc = load_config(config, seed)
    except (ConfigError, ValueError) as exc:
        raise InputError(str(exc)) from None
    if slots is not None:
        if slots < 1:
            raise InputError("--slots must be >= 1")
        sc = sc.replace(grid=TimeGrid(sc.grid.slot_duration_s, slots))
    if i_limit is not None:
        if i_limit < 1:
            raise InputError("--i-limit must be >= 1")
        sc = sc.replace(i_limit=i_limit)
    return sc


def _write(out: str, text: str) -> None:
    Path(out).write_text(text, encoding="utf-8")


def _run_search(sc: ScenarioConfig) -> SearchResult:
    return search(sc.template, list(sc.cells), list(sc.demands), sc.requirements,
                  sc.grid, sc.budget, sc.i_limit)


def result_document(res: SearchResult) -> dict:
    best = None
    if res.best is not None:
        b = res.best
        best = {"inc_deg": float(b.inclination_deg), "orbits": b.num_orbits, "sats_per_orbit": b.sats_per_orbit,
                "phasing": b.phasing, "altitude_km": float(b.altitude_km)}
    return {
        "best": best,
        "best_n": res.best_n,
        "iterations_used": res.iterations_used,
        "trace": [{"iter": e.iteration, "orbits": e.num_orbits, "sats_per_orbit": e.sats_per_orbit,
                   "n": e.n, "feasible": e.feasible} for e in res.trace],
    }


def _parse_values(text: str, param: str) -> list:
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise InputError(f"no values given for {param}")
    try:
        if param == "r_min":
            return [int(t) for t in items]
        return [float(t) for t in items]
    except ValueError:
        raise InputError(f"bad value list for {param}: {text!r}") from None


def apply_param(sc: ScenarioConfig, param: str, value) -> ScenarioConfig:
    """Scenario with one sweep parameter set; ``capacity`` scales every demand size."""
    req = sc.requirements
    try:
        if param == "r_min":
            return sc.replace(requirements=req.with_r_min(int(value)))
        if param == "lambda":
            return sc.replace(requirements=Requirements(req.r_min, float(value), dict(req.overrides)))
        if param == "capacity":
            if value <= 0:
                raise ValueError("capacity multiplier must be positive")
            return sc.replace(demands=tuple(d.scaled(value) for d in sc.demands))
        if param == "altitude":
            return sc.replace(template=_retemplate(sc, altitude_km=float(value)))
        if param == "inclination":
            return sc.replace(template=_retemplate(sc, inclination_deg=float(value)))
    except ValueError as exc:
        raise InputError(f"{param}={value}: {exc}") from None
    raise InputError(f"unknown sweep parameter {param!r}")


def _retemplate(sc: ScenarioConfig, **changes):
    return dataclasses.replace(sc.template, **changes)


def _fmt(value) -> str:
    return str(value) if isinstance(value, int) else repr(float(value))


common = [
    click.option("--config", "config", required=True, type=click.Path(dir_okay=False), help="Scenario YAML."),
    click.option("--out", "out", required=True, type=click.Path(dir_okay=False), help="Output file."),
    click.option("--seed", type=int, default=None, help="Override the scenario seed."),
    click.option("--slots", type=int, default=None, help="Override the number of time slots."),
    click.option("--i-limit", "i_limit", type=int, default=None, help="Override the search iteration cap."),
]


def with_common(fn):
    for opt in reversed(common):
        fn = opt(fn)
    return fn


@click.group()
@click.option("-v", "--verbose", count=True, help="More progress output on stderr.")
def cli(verbose):
    """Size LEO constellations against survivability, capacity and delay requirements."""
    level = logging.WARNING if verbose == 0 else logging.INFO if verbose == 1 else logging.DEBUG
    logging.basicConfig(level=level, stream=sys.stderr, format="%(levelname)s %(name)s: %(message)s")


@cli.command()
@with_common
def optimize(config, out, seed, slots, i_limit):
    """Search for the smallest feasible constellation."""
    sc = _load(config, seed, slots, i_limit)
    res = _run_search(sc)
    _write(out, json.dumps(result_document(res), indent=2) + "\n")
    if not res.feasible:
        click.echo("no feasible constellation within the search bracket", err=True)
        sys.exit(EXIT_INFEASIBLE)


@cli.command()
@with_common
@click.option("--param", required=True, help="One of " + ", ".join(SWEEP_PARAMS) + ".")
@click.option("--values", "values", required=True, help="Comma-separated values.")
@click.option("--param2", default=None, help="Optional second parameter (grid sweep).")
@click.option("--values2", default=None, help="Values for --param2.")
def sweep(config, out, seed, slots, i_limit, param, values, param2, values2):
    """One optimize run per value (or value pair); CSV output."""
    if param not in SWEEP_PARAMS:
        raise InputError(f"unknown sweep parameter {param!r}")
    if (param2 is None) != (values2 is None):
        raise InputError("--param2 and --values2 go together")
    if param2 is not None and (param2 not in SWEEP_PARAMS or param2 == param):
        raise InputError(f"bad second sweep parameter {param2!r}")
    sc = _load(config, seed, slots, i_limit)
    first = _parse_values(values, param)
    second = _parse_values(values2, param2) if param2 else [None]

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["param_value"] + (["param2_value"] if param2 else []) + ["best_n", "iterations", "feasible"])
    for v1 in first:
        for v2 in second:
            run = apply_param(sc, param, v1)
            if param2:
                run = apply_param(run, param2, v2)
            log.info("sweep %s=%s%s", param, v1, f" {param2}={v2}" if param2 else "")
            res = _run_search(run)
            w.writerow([_fmt(v1)] + ([_fmt(v2)] if param2 else [])
                       + ["" if res.best_n is None else res.best_n, res.iterations_used,
                          "true" if res.feasible else "false"])
    _write(out, buf.getvalue())


@cli.command()
@with_common
@click.option("--model", type=click.Choice([SOLAR_STORM, RANDOM]), required=True)
@click.option("--levels", required=True, help="Kill counts (solar_storm) or probabilities (random).")
@click.option("--trials", type=int, default=30, show_default=True)
def resilience(config, out, seed, slots, i_limit, model, levels, trials):
    """Reachability of the initial constellation under injected failures."""
    sc = _load(config, seed, slots, i_limit)
    if trials < 1:
        raise InputError("--trials must be >= 1")
    raw = _parse_values(levels, "levels")
    if model == SOLAR_STORM:
        if any(x != int(x) or x < 0 for x in raw):
            raise InputError("solar_storm levels must be non-negative integers")
        if max(raw) > sc.template.n_sats:
            raise InputError(f"kill count above {sc.template.n_sats} satellites")
    elif any(not 0.0 <= x <= 1.0 for x in raw):
        raise InputError("random levels must be probabilities in [0, 1]")
    if not sc.demands:
        raise InputError("resilience needs at least one demand")
    snaps = [build_snapshot(sc.template, list(sc.cells), t, sc.grid, sc.budget) for t in sc.grid.slots()]
    rows = resilience_sweep(snaps, sc.demands, sc.requirements.lam, model, raw, trials, sc.seed)

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["severity", "mean_reachability", "stddev", "trials"])
    for row in rows:
        sev = int(row.severity) if model == SOLAR_STORM else row.severity
        w.writerow([_fmt(sev), repr(row.mean_reachability), repr(row.stddev), row.trials])
    _write(out, buf.getvalue())


@cli.command()
@with_common
@click.option("--history", required=True, type=click.Path(dir_okay=False), help="date,cumulative_satellites CSV.")
@click.option("--aar", type=float, required=True, help="Annual decay rate, e.g. 0.026.")
@click.option("--years", type=int, required=True)
@click.option("--decay/--no-decay", default=False, help="Allow decreasing counts in the history.")
def casestudy(config, out, seed, slots, i_limit, history, aar, years, decay):
    """Deployment curve and decay projection for a launch history."""
    sc = _load(config, seed, slots, i_limit)
    try:
        hist = cs.load_launch_history(history, decay)
        if not hist.entries:
            raise ValueError(f"{history}: empty launch history")
        projection = cs.decay_projection(hist.entries[-1][1], aar, years)
    except OSError as exc:
        raise InputError(f"cannot read {history}: {exc.strerror}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    scenario = cs.Scenario(sc.template, list(sc.cells), list(sc.demands), sc.requirements,
                           sc.grid, sc.budget, sc.i_limit)
    curve = cs.deployment_curve(hist, scenario)
    doc = {
        "deployment_curve": [{"date": d.isoformat(), "satellites": n, "r_min": r} for d, n, r in curve],
        "decay_projection": [{"year": k, "satellites": n} for k, n in projection],
    }
    _write(out, json.dumps(doc, indent=2) + "\n")


def main(argv=None) -> int:
    try:
        cli.main(args=argv, prog_name="lsndesign", standalone_mode=False)
    except click.ClickException as exc:
        exc.show()
        return EXIT_INPUT
    except click.exceptions.Abort:
        return EXIT_INPUT
    except SystemExit as exc:
        return int(exc.code or 0)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
