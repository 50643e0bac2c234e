"""Per-slot network snapshots with +Grid ISLs and visibility-limited GSLs."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Hashable, Iterable, Mapping

import numpy as np

from .orbits import (
    R_EARTH_KM,
    CellId,
    ConstellationConfig,
    SatelliteId,
    TimeGrid,
    cell_positions,
    elevation_deg,
    satellite_positions,
    segment_clearance_km,
)

Node = Hashable


class UnsupportedConfigurationError(ValueError):
    pass


@dataclass(frozen=True)
class LinkBudget:
    """Link capacities (Gbps), transceiver count and visibility thresholds."""

    isl_capacity_gbps: float = 20.0
    gsl_capacity_gbps: float = 4.0
    n_isl: int = 4
    sat_max_uplink_gbps: float = 20.0
    sat_max_downlink_gbps: float = 20.0
    min_elevation_deg: float = 25.0
    min_los_altitude_km: float = 80.0

    def __post_init__(self):
        for name in ("isl_capacity_gbps", "gsl_capacity_gbps", "n_isl",
                     "sat_max_uplink_gbps", "sat_max_downlink_gbps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if not -90.0 <= self.min_elevation_deg <= 90.0:
            raise ValueError(f"min_elevation_deg {self.min_elevation_deg} outside [-90, 90]")
        if self.min_los_altitude_km < 0:
            raise ValueError("min_los_altitude_km must be non-negative")


@dataclass(frozen=True)
class Snapshot:
    """One time slot of the constellation graph.

    ``isl_edges`` maps an unordered satellite pair to its capacity;
    ``gsl_edges`` maps ``(cell, satellite)`` to ``(uplink, downlink)``
    capacity. Treat instances as immutable.
    """

    slot: int
    satellites: tuple
    cells: tuple
    isl_edges: dict
    gsl_edges: dict
    positions: dict = field(default_factory=dict, repr=False)
    adjacency: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        adj: dict = {n: [] for n in self.satellites}
        adj.update({c: [] for c in self.cells})
        for a, b in self.isl_edges:
            adj[a].append(b)
            adj[b].append(a)
        for c, s in self.gsl_edges:
            adj[c].append(s)
            adj[s].append(c)
        object.__setattr__(self, "adjacency", {n: tuple(v) for n, v in adj.items()})

    @property
    def nodes(self) -> tuple:
        return tuple(self.adjacency)

    def degree(self, node: Node) -> int:
        return len(self.adjacency[node])

    def isl_degree(self, sat: Node) -> int:
        return sum(1 for n in self.adjacency[sat] if n not in self._cell_set)

    @property
    def _cell_set(self) -> frozenset:
        return frozenset(self.cells)

    def cell_capacity(self, cell: CellId) -> tuple[float, float]:
        """Total (uplink, downlink) GSL capacity available to ``cell``."""
        up = down = 0.0
        for (c, _), (u, d) in self.gsl_edges.items():
            if c == cell:
                up += u
                down += d
        return up, down

    def without(self, removed: Iterable[Node]) -> "Snapshot":
        """Copy with the given satellites and all their links removed."""
        gone = set(removed)
        return Snapshot(
            slot=self.slot,
            satellites=tuple(s for s in self.satellites if s not in gone),
            cells=self.cells,
            isl_edges={e: c for e, c in self.isl_edges.items() if e[0] not in gone and e[1] not in gone},
            gsl_edges={e: c for e, c in self.gsl_edges.items() if e[1] not in gone},
            positions={n: p for n, p in self.positions.items() if n not in gone},
        )

    @classmethod
    def from_edges(cls, edges, cells=(), nodes=(), slot=0, capacity=1.0, positions=None) -> "Snapshot":
        """Build an abstract snapshot from an undirected edge list.

        Edges touching a node listed in ``cells`` become ground links; every
        other node is treated as a satellite.
        """
        cell_set = set(cells)
        order: dict = dict.fromkeys(nodes)
        isl, gsl = {}, {}
        for a, b in edges:
            if a == b:
                raise ValueError(f"self-loop on {a!r}")
            order.setdefault(a)
            order.setdefault(b)
            if a in cell_set and b in cell_set:
                raise ValueError("ground-to-ground edges are not links")
            if a in cell_set:
                gsl[(a, b)] = (capacity, capacity)
            elif b in cell_set:
                gsl[(b, a)] = (capacity, capacity)
            elif (b, a) not in isl:
                isl[(a, b)] = capacity
        return cls(
            slot=slot,
            satellites=tuple(n for n in order if n not in cell_set),
            cells=tuple(cells),
            isl_edges=isl,
            gsl_edges=gsl,
            positions=dict(positions or {}),
        )


def adjacency_of(graph) -> Mapping:
    return graph.adjacency if isinstance(graph, Snapshot) else graph


def plus_grid_pairs(num_orbits: int, sats_per_orbit: int) -> list[tuple[SatelliteId, SatelliteId]]:
    """Candidate +Grid ISLs: ring neighbours in-orbit, same slot across adjacent orbits.

    Orbit ``O-1`` wraps to orbit 0. Coincident neighbours (O or M equal to 2)
    yield a single link.
    """
    seen: dict = {}
    for o in range(num_orbits):
        for m in range(sats_per_orbit):
            here = SatelliteId(o, m)
            for other in (SatelliteId(o, (m + 1) % sats_per_orbit), SatelliteId((o + 1) % num_orbits, m)):
                if other == here:
                    continue
                key = (min(here, other), max(here, other))
                seen.setdefault(key, None)
    return list(seen)


def build_snapshot(
    config: ConstellationConfig,
    cells: list[CellId],
    t: int,
    grid: TimeGrid,
    budget: LinkBudget,
) -> Snapshot:
    if budget.n_isl != 4:
        raise UnsupportedConfigurationError(f"+Grid needs n_isl = 4, got {budget.n_isl}")

    sat_pos = satellite_positions(config, t, grid)
    sats = config.satellites()
    positions = {s: sat_pos[s] for s in sats}

    pairs = plus_grid_pairs(config.num_orbits, config.sats_per_orbit)
    isl = {}
    if pairs:
        a = np.array([sat_pos[p[0]] for p in pairs])
        b = np.array([sat_pos[p[1]] for p in pairs])
        clear = segment_clearance_km(a, b) >= R_EARTH_KM + budget.min_los_altitude_km
        isl = {p: budget.isl_capacity_gbps for p, ok in zip(pairs, clear) if ok}

    cells = list(cells)
    gsl = {}
    if cells:
        cpos = cell_positions(cells, t, grid)
        flat = sat_pos.reshape(-1, 3)
        elev = elevation_deg(cpos[:, None, :], flat[None, :, :])
        dist = np.linalg.norm(cpos[:, None, :] - flat[None, :, :], axis=-1)
        visible = elev >= budget.min_elevation_deg
        per_sat = int(min(budget.sat_max_uplink_gbps, budget.sat_max_downlink_gbps)
                      // budget.gsl_capacity_gbps + 1e-9)
        admitted = np.zeros_like(visible)
        for j in range(flat.shape[0]):
            seen = np.flatnonzero(visible[:, j])
            # nearest cells win when the satellite's beam budget binds
            ranked = seen[np.argsort(dist[seen, j], kind="stable")]
            admitted[ranked[:per_sat], j] = True
        for i, c in enumerate(cells):
            for j in np.flatnonzero(admitted[i]):
                gsl[(c, sats[j])] = (budget.gsl_capacity_gbps, budget.gsl_capacity_gbps)
            positions[c] = cpos[i]

    return Snapshot(
        slot=t,
        satellites=tuple(sats),
        cells=tuple(cells),
        isl_edges=isl,
        gsl_edges=gsl,
        positions=positions,
    )


def hop_distances(graph, source: Node, limit: int | None = None) -> dict:
    """BFS hop counts from ``source``; stops expanding past ``limit`` hops."""
    adj = adjacency_of(graph)
    dist = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        if limit is not None and dist[u] >= limit:
            continue
        for v in adj[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_hops(graph, a: Node, b: Node) -> int | None:
    """Unit-cost hop count from ``a`` to ``b``; ``None`` when unreachable."""
    adj = adjacency_of(graph)
    for n in (a, b):
        if n not in adj:
            raise ValueError(f"unknown node {n!r}")
    return hop_distances(graph, a).get(b)
