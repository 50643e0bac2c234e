"""Scenario documents (YAML) and their translation into model objects.

A scenario looks like::

    seed: 7
    constellation: {inclination_deg: 53, num_orbits: 6, sats_per_orbit: 6,
                    phasing: 1, altitude_km: 2000}
    time_grid: {slot_duration_s: 600, num_slots: 20}
    link_budget: {min_elevation_deg: 0}
    cells: cells.csv                    # relative to the scenario file
    demands:
      generate: {pair_count: 4, rate_per_capita: 2.0e-6}
      # or: list: [{src: [40.0, -100.0], dst: [50.0, 10.0], size_gbps: 6}]
    requirements:
      r_min: 2
      lambda: 1.5
      overrides: [{a: [40.0, -100.0], b: [50.0, 10.0], r: 3}]
    search: {i_limit: 20}
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from pathlib import Path

import yaml

from .demands import Demand, Requirements, find_cell, generate_demands, load_cells
from .megareduce import DEFAULT_I_LIMIT
from .orbits import CellId, ConstellationConfig, TimeGrid
from .topology import LinkBudget

_TOP_KEYS = {"seed", "constellation", "time_grid", "link_budget", "cells", "demands",
             "requirements", "search"}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ScenarioConfig:
    template: ConstellationConfig
    grid: TimeGrid
    budget: LinkBudget
    cells: tuple
    demands: tuple
    requirements: Requirements
    i_limit: int = DEFAULT_I_LIMIT
    seed: int = 0

    def replace(self, **changes) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)


def _section(doc: dict, key: str, cls, required: bool):
    raw = doc.get(key)
    if raw is None:
        if required:
            raise ConfigError(f"missing section {key!r}")
        return cls()
    if not isinstance(raw, dict):
        raise ConfigError(f"section {key!r} must be a mapping")
    try:
        return cls(**raw)
    except TypeError as exc:
        raise ConfigError(f"{key}: {exc}") from None


def _cell_at(cells, ref, where: str) -> CellId:
    if not (isinstance(ref, (list, tuple)) and len(ref) == 2):
        raise ConfigError(f"{where}: cell reference must be [lat, lon], got {ref!r}")
    try:
        return find_cell(cells, float(ref[0]), float(ref[1]))
    except (KeyError, ValueError) as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _requirements(raw, cells) -> Requirements:
    raw = dict(raw or {})
    unknown = set(raw) - {"r_min", "lambda", "overrides"}
    if unknown:
        raise ConfigError(f"requirements: unknown keys {sorted(unknown)}")
    overrides = {}
    for k, item in enumerate(raw.get("overrides") or []):
        where = f"requirements.overrides[{k}]"
        a = _cell_at(cells, item.get("a"), where)
        b = _cell_at(cells, item.get("b"), where)
        overrides[frozenset((a, b))] = int(item["r"])
    return Requirements(int(raw.get("r_min", 1)), float(raw.get("lambda", 1.0)), overrides)


def _demands(raw, cells, seed: int) -> tuple:
    if not isinstance(raw, dict) or len(raw) != 1 or not {"generate", "list"} & set(raw):
        raise ConfigError("demands must hold exactly one of 'generate' or 'list'")
    if "generate" in raw:
        gen = raw["generate"] or {}
        return tuple(generate_demands(cells, int(gen["pair_count"]), float(gen["rate_per_capita"]),
                                      int(gen.get("seed", seed))))
    out = []
    for k, item in enumerate(raw["list"] or []):
        where = f"demands.list[{k}]"
        out.append(Demand(_cell_at(cells, item.get("src"), where),
                          _cell_at(cells, item.get("dst"), where), float(item["size_gbps"])))
    return tuple(out)


def parse_config(doc, base_dir: Path, seed: int | None = None) -> ScenarioConfig:
    """Validate a parsed scenario; ``seed`` overrides the document's seed."""
    if not isinstance(doc, dict):
        raise ConfigError("scenario must be a mapping")
    unknown = set(doc) - _TOP_KEYS
    if unknown:
        raise ConfigError(f"unknown top-level keys {sorted(unknown)}")
    try:
        seed = int(doc.get("seed", 0)) if seed is None else int(seed)
        template = _section(doc, "constellation", ConstellationConfig, True)
        grid = _section(doc, "time_grid", TimeGrid, False)
        budget = _section(doc, "link_budget", LinkBudget, False)
        if "cells" not in doc:
            raise ConfigError("missing 'cells' file")
        cells_path = Path(doc["cells"])
        if not cells_path.is_absolute():
            cells_path = base_dir / cells_path
        if not cells_path.is_file():
            raise ConfigError(f"cells file {cells_path} not found")
        cells = tuple(load_cells(cells_path))
        demands = _demands(doc.get("demands"), cells, seed)
        requirements = _requirements(doc.get("requirements"), cells)
        search = doc.get("search") or {}
        i_limit = int(search.get("i_limit", DEFAULT_I_LIMIT))
        if i_limit < 1:
            raise ConfigError("search.i_limit must be >= 1")
    except ConfigError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"{type(exc).__name__}: {exc}") from None
    return ScenarioConfig(template, grid, budget, cells, demands, requirements, i_limit, seed)


def load_config(path, seed: int | None = None) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = yaml.safe_load(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from None
    except yaml.YAMLError as exc:
        raise ConfigError(f"{path}: invalid YAML: {exc}") from None
    return parse_config(doc, path.parent, seed)
