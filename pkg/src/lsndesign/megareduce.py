"""Requirement-driven constellation sizing.

Brackets the satellite count between a coverage lower bound and the
initial constellation, then alternates feasibility checks with
shrink/expand moves that keep the orbit count and the per-orbit count
close to each other.
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .demands import Requirements
from .feasibility import feasibility_check
from .orbits import ConstellationConfig, TimeGrid, cell_positions, elevation_deg, satellite_positions
from .topology import LinkBudget

log = logging.getLogger(__name__)

DEFAULT_I_LIMIT = 20


class TuningError(ValueError):
    """Shrink/expand cannot move the constellation within its bracket."""


class TraceEntry(NamedTuple):
    iteration: int
    num_orbits: int
    sats_per_orbit: int
    n: int
    feasible: bool


@dataclass
class SearchState:
    n_min: int
    n_max: int
    i_limit: int
    iteration: int = 0
    feasible_results: list = field(default_factory=list)


@dataclass(frozen=True)
class SearchResult:
    best: ConstellationConfig | None
    best_n: int | None
    trace: tuple
    iterations_used: int
    n_min: int

    @property
    def feasible(self) -> bool:
        return self.best is not None


class SurvivableBound(NamedTuple):
    n_min: int
    satisfied: bool


def balanced_shape(n: int, max_orbits: int | None = None) -> tuple[int, int]:
    """(O, M) with O close to M, O*M >= n and O capped at ``max_orbits``."""
    if n < 1:
        raise ValueError("need at least one satellite")
    o = max(1, math.isqrt(n))
    if max_orbits is not None:
        o = min(o, max_orbits)
    return o, -(-n // o)


def coverage_ok(config: ConstellationConfig, cells, need: dict, grid: TimeGrid,
                min_elevation_deg: float) -> bool:
    """Every cell in ``need`` sees at least ``need[cell]`` satellites in every slot."""
    cells = [c for c in cells if need.get(c, 0) > 0]
    if not cells:
        return True
    want = np.array([need[c] for c in cells])
    if want.max() > config.n_sats:
        return False
    for t in grid.slots():
        sats = satellite_positions(config, t, grid).reshape(-1, 3)
        ground = cell_positions(cells, t, grid)
        seen = (elevation_deg(ground[:, None, :], sats[None, :, :]) >= min_elevation_deg).sum(axis=1)
        if np.any(seen < want):
            return False
    return True


def get_survivable_bound(
    template: ConstellationConfig,
    cells,
    requirements: Requirements,
    grid: TimeGrid,
    budget: LinkBudget,
) -> SurvivableBound:
    """Smallest N whose balanced reshape of ``template`` gives every available
    cell at least ``max_j r_ij`` visible satellites in every slot.

    Binary search on N over shapes from :func:`balanced_shape` (orbit count
    capped at the template's). Falls back to the template size, flagged
    unsatisfied, when even the template lacks the coverage.
    """
    available = [c for c in cells if c.service_available]
    need = {c: requirements.max_r(c, available) for c in available}
    if max(need.values(), default=0) == 0:
        return SurvivableBound(1, True)

    def ok(n: int) -> bool:
        o, m = balanced_shape(n, template.num_orbits)
        return coverage_ok(template.reshaped(o, m), available, need, grid, budget.min_elevation_deg)

    hi = template.n_sats
    if not ok(hi):
        log.warning("template %dx%d lacks the coverage for the survivability bound",
                    template.num_orbits, template.sats_per_orbit)
        return SurvivableBound(hi, False)
    lo = 1
    while lo < hi:
        mid = (lo + hi) // 2
        if ok(mid):
            hi = mid
        else:
            lo = mid + 1
    return SurvivableBound(lo, True)


def shrink(config: ConstellationConfig, n_min: int) -> ConstellationConfig:
    """Move toward the midpoint of ``[n_min, N]``, trimming the larger dimension.

    Target is ``floor((N + n_min) / 2)``; at least one orbit or one
    satellite per orbit is removed so the search never stalls.
    """
    o, m = config.num_orbits, config.sats_per_orbit
    current = o * m
    if current <= n_min or current <= 1:
        raise TuningError(f"cannot shrink {o}x{m} (N={current}) at lower bound {n_min}")
    target = (current + n_min) // 2
    if o <= m:
        m = max(1, m - max(1, (current - target) // o))
    else:
        o = max(1, o - max(1, (current - target) // m))
    return config.reshaped(o, m)


def expand(config: ConstellationConfig, n_max: int) -> ConstellationConfig:
    """Move toward the midpoint of ``[N, n_max]``, growing the smaller dimension."""
    o, m = config.num_orbits, config.sats_per_orbit
    current = o * m
    if current >= n_max:
        raise TuningError(f"cannot expand {o}x{m} (N={current}) at upper bound {n_max}")
    target = (current + n_max) // 2
    if o <= m:
        o += max(1, (target - current) // m)
    else:
        m += max(1, (target - current) // o)
    return config.reshaped(o, m)


def search(
    initial: ConstellationConfig,
    cells,
    demands,
    requirements: Requirements,
    grid: TimeGrid,
    budget: LinkBudget,
    i_limit: int = DEFAULT_I_LIMIT,
    n_min: int | None = None,
) -> SearchResult:
    """Find the smallest feasible constellation reachable by shrink/expand.

    Performs at most ``i_limit`` feasibility checks and stops early once the
    next move is impossible or revisits an already-checked shape.
    """
    if i_limit < 1:
        raise ValueError("i_limit must be >= 1")
    if n_min is None:
        n_min = get_survivable_bound(initial, cells, requirements, grid, budget).n_min
    state = SearchState(n_min=min(n_min, initial.n_sats), n_max=initial.n_sats, i_limit=i_limit)
    demands = list(demands)

    verdicts: dict = {}
    trace = []
    current = initial
    while state.iteration < state.i_limit:
        shape = (current.num_orbits, current.sats_per_orbit)
        if shape not in verdicts:
            verdicts[shape] = feasibility_check(current, cells, demands, requirements, grid, budget).feasible
            state.iteration += 1
        ok = verdicts[shape]
        n = current.n_sats
        trace.append(TraceEntry(state.iteration, *shape, n, ok))
        log.info("iter %d: %dx%d N=%d %s [%d, %d]", state.iteration, *shape, n,
                 "feasible" if ok else "infeasible", state.n_min, state.n_max)
        try:
            if ok:
                state.n_max = n
                state.feasible_results.append((current, n))
                nxt = shrink(current, state.n_min)
            else:
                state.n_min = max(state.n_min, n)
                nxt = expand(current, state.n_max)
        except TuningError:
            break
        if (nxt.num_orbits, nxt.sats_per_orbit) in verdicts:
            break
        current = nxt

    if not state.feasible_results:
        return SearchResult(None, None, tuple(trace), state.iteration, n_min)
    best, best_n = min(state.feasible_results, key=lambda item: item[1])
    return SearchResult(best, best_n, tuple(trace), state.iteration, n_min)
