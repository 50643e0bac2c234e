"""Inverse sizing: achievable survivability for a satellite budget, launch
histories and decay projections."""
from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field

from .demands import Requirements
from .megareduce import DEFAULT_I_LIMIT, search
from .orbits import ConstellationConfig, TimeGrid
from .topology import LinkBudget

R_GUARD = 16


class HistoryFileError(ValueError):
    pass


@dataclass(frozen=True)
class LaunchHistory:
    entries: tuple  # ((date, cumulative_satellites), ...)
    decay: bool = False

    def __post_init__(self):
        dates = [d for d, _ in self.entries]
        if any(b <= a for a, b in zip(dates, dates[1:])):
            raise ValueError("history dates must be strictly increasing")
        counts = [n for _, n in self.entries]
        if any(n < 0 for n in counts):
            raise ValueError("satellite counts must be non-negative")
        if not self.decay and any(b < a for a, b in zip(counts, counts[1:])):
            raise ValueError("cumulative counts must be non-decreasing (set decay for decay data)")


def load_launch_history(path, decay: bool = False) -> LaunchHistory:
    """Read ``date,cumulative_satellites`` rows with ISO-8601 dates."""
    entries = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["date", "cumulative_satellites"]:
            raise HistoryFileError(f"{path}:1: expected header date,cumulative_satellites")
        for row in reader:
            if not row or all(not x.strip() for x in row):
                continue
            try:
                if len(row) != 2:
                    raise ValueError(f"expected 2 fields, got {len(row)}")
                entries.append((dt.date.fromisoformat(row[0].strip()), int(row[1])))
            except ValueError as exc:
                raise HistoryFileError(f"{path}:{reader.line_num}: {exc}") from None
    return LaunchHistory(tuple(entries), decay)


@dataclass
class Scenario:
    """Everything a sizing run needs apart from the survivability level."""

    template: ConstellationConfig
    cells: list
    demands: list
    requirements: Requirements
    grid: TimeGrid
    budget: LinkBudget
    i_limit: int = DEFAULT_I_LIMIT
    _required: dict = field(default_factory=dict, repr=False)

    def required_satellites(self, r: int) -> int | None:
        """Smallest feasible N found for survivability ``r`` (``None``: none found)."""
        if r not in self._required:
            res = search(self.template, self.cells, self.demands, self.requirements.with_r_min(r),
                         self.grid, self.budget, self.i_limit)
            self._required[r] = res.best_n
        return self._required[r]


def inverse_lookup(required, n: int, r_guard: int = R_GUARD) -> int:
    """Largest r whose requirements up to r all fit within ``n`` satellites.

    ``required`` maps r to the satellites needed (``None`` when unattainable);
    a mapping or a callable.
    """
    need = required if callable(required) else required.get
    r = 0
    while r < r_guard:
        n_req = need(r + 1)
        if n_req is None or n_req > n:
            break
        r += 1
    return r


def max_survivability_for_count(n: int, scenario: Scenario) -> int:
    if n < 0:
        raise ValueError("satellite count must be non-negative")
    return inverse_lookup(scenario.required_satellites, n)


def deployment_curve(history: LaunchHistory, scenario: Scenario) -> list[tuple[dt.date, int, int]]:
    """``(date, satellites, r_min)`` for each history entry."""
    if not history.entries:
        raise ValueError("empty launch history")
    cache: dict = {}
    out = []
    for date, count in history.entries:
        if count not in cache:
            cache[count] = max_survivability_for_count(count, scenario)
        out.append((date, count, cache[count]))
    return out


def decay_projection(n0: int, aar: float, years: int) -> list[tuple[int, int]]:
    """``(year, count)`` with count = round-half-up of ``n0 * (1 - aar) ** year``."""
    if not 0.0 <= aar < 1.0:
        raise ValueError(f"annual decay rate {aar} outside [0, 1)")
    if years < 0 or n0 < 0:
        raise ValueError("n0 and years must be non-negative")
    return [(k, int(math.floor(n0 * (1.0 - aar) ** k + 0.5))) for k in range(years + 1)]
