"""Traffic demands, survivability/delay requirements and cell files."""
from __future__ import annotations

import csv
import math
import random
from dataclasses import dataclass, field

from .orbits import CellId

CELL_HEADER = ("lat_deg", "lon_deg", "population", "service_available")


class CellFileError(ValueError):
    pass


@dataclass(frozen=True)
class Demand:
    src: CellId
    dst: CellId
    size_gbps: float

    def __post_init__(self):
        if self.src == self.dst:
            raise ValueError("demand endpoints must differ")
        if not self.size_gbps > 0:
            raise ValueError(f"demand size must be positive, got {self.size_gbps}")

    def scaled(self, factor: float) -> "Demand":
        return Demand(self.src, self.dst, self.size_gbps * factor)


@dataclass(frozen=True)
class Requirements:
    """Per-pair survivability ``r`` (symmetric) and the hop-stretch factor.

    ``overrides`` maps ``frozenset({cell_a, cell_b})`` to an explicit r.
    """

    r_min: int = 1
    lam: float = 1.0
    overrides: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.r_min < 0:
            raise ValueError("r_min must be non-negative")
        if self.lam < 1.0:
            raise ValueError(f"lambda must be >= 1, got {self.lam}")
        for pair, r in self.overrides.items():
            if len(pair) != 2 or r < 0:
                raise ValueError(f"bad requirement override {pair!r}: {r}")

    def r(self, a: CellId, b: CellId) -> int:
        return self.overrides.get(frozenset((a, b)), self.r_min)

    def max_r(self, cell: CellId, cells) -> int:
        """Largest requirement ``cell`` takes part in against any other cell."""
        best = max((self.r(cell, other) for other in cells if other != cell), default=0)
        return best

    def hop_bound(self, shortest: int) -> int:
        # guard against 1.5 * 2 = 3.0000000000000004 style ceil errors
        return math.ceil(self.lam * shortest - 1e-9)

    def with_r_min(self, r_min: int) -> "Requirements":
        return Requirements(r_min, self.lam, dict(self.overrides))


def eligible_cells(cells) -> list[CellId]:
    return [c for c in cells if c.service_available and c.population > 0]


def generate_demands(cells, pair_count: int, rate_per_capita: float, rng_seed: int) -> list[Demand]:
    """Sample distinct ordered (src, dst) pairs uniformly among eligible cells.

    Sizes follow the source population: ``rate_per_capita * population``.
    """
    pool = eligible_cells(cells)
    n = len(pool)
    if n < 2:
        raise ValueError(f"need at least 2 service-available populated cells, got {n}")
    if pair_count < 0:
        raise ValueError("pair_count must be non-negative")
    total = n * (n - 1)
    if pair_count > total:
        raise ValueError(f"only {total} distinct pairs among {n} cells, asked for {pair_count}")
    if rate_per_capita <= 0:
        raise ValueError("rate_per_capita must be positive")

    rng = random.Random(rng_seed)
    out = []
    for idx in rng.sample(range(total), pair_count):
        i, k = divmod(idx, n - 1)
        j = k if k < i else k + 1
        src, dst = pool[i], pool[j]
        out.append(Demand(src, dst, rate_per_capita * src.population))
    return out


def _parse_bool(text: str) -> bool:
    value = text.strip().lower()
    if value == "true":
        return True
    if value == "false":
        return False
    raise ValueError(f"expected true/false, got {text!r}")


def load_cells(path) -> list[CellId]:
    """Read a cell CSV (``lat_deg,lon_deg,population,service_available``)."""
    cells: list[CellId] = []
    seen: dict = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None:
            return cells
        if tuple(h.strip() for h in header) != CELL_HEADER:
            raise CellFileError(f"{path}:1: expected header {','.join(CELL_HEADER)}")
        for row in reader:
            line = reader.line_num
            if not row or all(not x.strip() for x in row):
                continue
            if len(row) != 4:
                raise CellFileError(f"{path}:{line}: expected 4 fields, got {len(row)}")
            try:
                cell = CellId(float(row[0]), float(row[1]), float(row[2]), _parse_bool(row[3]))
            except ValueError as exc:
                raise CellFileError(f"{path}:{line}: {exc}") from None
            if cell.key in seen:
                raise ValueError(f"{path}:{line}: duplicate cell at {cell.key} (first on line {seen[cell.key]})")
            seen[cell.key] = line
            cells.append(cell)
    return cells


def write_cells(path, cells) -> None:
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(CELL_HEADER)
        for c in cells:
            w.writerow([repr(c.lat_deg), repr(c.lon_deg), repr(c.population),
                        "true" if c.service_available else "false"])


def uniform_cell_grid(lat_step: float, lon_step: float, population: float = 1.0,
                      lat_limit: float = 70.0) -> list[CellId]:
    """Regular lat/lon grid inside the +/-``lat_limit`` band (default: the populated band)."""
    cells = []
    n_lat = int(math.floor(2 * lat_limit / lat_step + 1e-9)) + 1
    n_lon = int(math.floor(360.0 / lon_step + 1e-9))
    for i in range(n_lat):
        lat = -lat_limit + i * lat_step
        for k in range(n_lon):
            lon = -180.0 + k * lon_step
            if lon < 180.0:
                cells.append(CellId(round(lat, 9), round(lon, 9), population, True))
    return cells


def find_cell(cells, lat: float, lon: float) -> CellId:
    for c in cells:
        if c.lat_deg == lat and c.lon_deg == lon:
            return c
    raise KeyError(f"no cell at ({lat}, {lon})")

