"""Survivability, capacity and delay feasibility of a constellation.

For every slot and demand the snapshot is expanded into a hop-layered
directed graph whose src-to-sink paths are exactly the walks of at most L
hops. Its unit-capacity max-flow counts hop-bounded arc-disjoint paths;
GSL capacity is then debited from per-cell uplink/downlink ledgers.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Hashable

from .demands import Demand, Requirements
from .flow import FlowNetwork
from .orbits import ConstellationConfig, TimeGrid
from .topology import LinkBudget, Snapshot, adjacency_of, build_snapshot, hop_distances

log = logging.getLogger(__name__)

SURVIVABILITY = "survivability"
UPLINK = "uplink_capacity"
DOWNLINK = "downlink_capacity"

_EPS = 1e-9


class OracleScaleError(ValueError):
    """Instance too large for exponential-time exact search."""


@dataclass(frozen=True)
class LayeredGraph:
    """Hop-layered expansion of a graph for one src/dst pair.

    Nodes are ``(v, layer)``: ``src`` only at layer 1, every other node at
    layers ``2..hops``, and ``dst`` alone at layer ``hops + 1``. Arcs join
    consecutive layers along graph edges; ``dst`` additionally advances
    ``dst_l -> dst_{l+1}`` so shorter walks can wait for the sink.
    """

    src: Hashable
    dst: Hashable
    hops: int
    nodes: tuple
    arcs: tuple  # ((u, l), (v, l + 1), capacity)
    base: dict = field(repr=False, compare=False)

    @property
    def sink(self):
        return (self.dst, self.hops + 1)

    @property
    def source(self):
        return (self.src, 1)


def build_layered_graph(graph, src, dst, hops: int) -> LayeredGraph:
    """Layered expansion of ``graph`` (a Snapshot or adjacency mapping).

    Self-advance arcs of ``dst`` carry ``deg(dst)`` units rather than one:
    the sink can absorb at most ``deg(dst)`` paths anyway, and a unit cap
    would let two short paths block each other.
    """
    adj = adjacency_of(graph)
    if src == dst:
        raise ValueError("src and dst must differ")
    for n in (src, dst):
        if n not in adj:
            raise ValueError(f"unknown node {n!r}")
    if hops < 1:
        raise ValueError(f"hop bound must be >= 1, got {hops}")

    others = [v for v in adj if v != src]
    nodes = [(src, 1)]
    for layer in range(2, hops + 1):
        nodes.extend((v, layer) for v in others)
    nodes.append((dst, hops + 1))

    arcs = []
    for layer in range(1, hops + 1):
        tails = [src] if layer == 1 else others
        for i in tails:
            for j in adj[i]:
                if layer + 1 <= hops:
                    if j != src:
                        arcs.append(((i, layer), (j, layer + 1), 1))
                elif j == dst:
                    arcs.append(((i, layer), (dst, layer + 1), 1))
    wait = max(1, len(adj[dst]))
    for layer in range(2, hops + 1):
        arcs.append(((dst, layer), (dst, layer + 1), wait))
    return LayeredGraph(src, dst, hops, tuple(nodes), tuple(arcs), dict(adj))


def _useful_arcs(lg: LayeredGraph) -> list:
    """Arcs lying on some source-to-sink path (others never carry flow)."""
    fwd = {lg.source}
    for arc in lg.arcs:  # arcs are emitted in layer order
        if arc[0] in fwd:
            fwd.add(arc[1])
    back = {lg.sink}
    for arc in reversed(lg.arcs):
        if arc[1] in back:
            back.add(arc[0])
    # self-advance arcs are appended last, so re-run until stable
    changed = True
    while changed:
        changed = False
        for arc in lg.arcs:
            if arc[0] in fwd and arc[1] not in fwd:
                fwd.add(arc[1])
                changed = True
            if arc[1] in back and arc[0] not in back:
                back.add(arc[0])
                changed = True
    return [a for a in lg.arcs if a[0] in fwd and a[1] in back]


def layered_max_flow(lg: LayeredGraph, limit: int | None = None) -> int:
    """Integer max-flow from ``src_1`` to ``dst_{L+1}`` in the layered graph."""
    arcs = _useful_arcs(lg)
    if not arcs:
        return 0
    index = {lg.source: 0, lg.sink: 1}
    for u, v, _ in arcs:
        index.setdefault(u, len(index))
        index.setdefault(v, len(index))
    net = FlowNetwork(len(index))
    for u, v, cap in arcs:
        net.add_edge(index[u], index[v], cap)
    return net.max_flow(0, 1, limit)


def classical_max_flow(graph, src, dst, limit: int | None = None) -> int:
    """Edge-disjoint src-dst path count ignoring hop bounds (unit undirected edges)."""
    adj = adjacency_of(graph)
    index = {v: k for k, v in enumerate(adj)}
    net = FlowNetwork(len(index))
    for u, nbrs in adj.items():
        for v in nbrs:
            net.add_edge(index[u], index[v], 1)
    return net.max_flow(index[src], index[dst], limit)


def max_disjoint_paths(lg: LayeredGraph, limit: int | None = None) -> int:
    """Hop-bounded disjoint-path count used by the feasibility check.

    The layered flow alone may route two walks over one physical edge at
    different hop positions, which can push it above the plain min-cut, so
    the result is capped by the unconstrained edge-disjoint max-flow. Both
    bounds are relaxations of the true count, hence so is their minimum.
    """
    layered = layered_max_flow(lg, limit)
    if layered == 0:
        return 0
    return min(layered, classical_max_flow(lg.base, lg.src, lg.dst, limit))


def exact_disjoint_paths(graph, src, dst, hops: int, r_target: int | None = None,
                         max_nodes: int = 14, max_edges: int = 30) -> int:
    """Exact maximum number of edge-disjoint simple paths of at most ``hops`` edges.

    Backtracking over path sets; paths are taken in order of their first
    edge out of ``src`` (all distinct by disjointness), which removes
    permutation symmetry. With ``r_target`` the search stops once that many
    are found. Exponential: refuses graphs beyond the size guard.
    """
    adj = adjacency_of(graph)
    n_edges = sum(len(v) for v in adj.values()) // 2
    if len(adj) > max_nodes or n_edges > max_edges:
        raise OracleScaleError(
            f"{len(adj)} nodes / {n_edges} edges exceeds oracle guard {max_nodes}/{max_edges}")
    if src == dst:
        raise ValueError("src and dst must differ")
    if hops < 1:
        return 0

    to_dst = hop_distances(adj, dst)
    firsts = [v for v in adj[src] if to_dst.get(v, hops + 1) + 1 <= hops]
    goal = min(len(firsts), len(adj[dst]))
    if r_target is not None:
        goal = min(goal, r_target)
    used: set = set()

    def paths_via(first):
        e0 = frozenset((src, first))
        if first == dst:
            yield [e0]
            return
        stack = [(first, iter(adj[first]))]
        on_path = {src, first}
        edges = [e0]
        while stack:
            u, nbrs = stack[-1]
            for v in nbrs:
                e = frozenset((u, v))
                if v in on_path or e in used:
                    continue
                if len(edges) + 1 + to_dst.get(v, hops + 1) > hops:
                    continue
                if v == dst:
                    yield edges + [e]
                    continue
                on_path.add(v)
                edges.append(e)
                stack.append((v, iter(adj[v])))
                break
            else:
                stack.pop()
                on_path.discard(u)
                edges.pop()

    best = 0

    def search(start: int, count: int) -> bool:
        nonlocal best
        best = max(best, count)
        if best >= goal:
            return True
        if count + len(firsts) - start <= best:
            return False
        for k in range(start, len(firsts)):
            for path in paths_via(firsts[k]):
                used.update(path)
                done = search(k + 1, count + 1)
                used.difference_update(path)
                if done:
                    return True
        return False

    search(0, 0)
    return best


@dataclass(frozen=True)
class FeasibilityReport:
    feasible: bool
    failing_slot: int | None = None
    failing_demand: Demand | None = None
    failure_kind: str | None = None
    achieved_r: int | None = None
    consumed_uplink: dict = field(default_factory=dict, compare=False, repr=False)
    consumed_downlink: dict = field(default_factory=dict, compare=False, repr=False)


def check_snapshot(snapshot: Snapshot, demands, requirements: Requirements) -> FeasibilityReport:
    """Run the per-slot survivability and GSL-capacity checks in demand order."""
    up_left: dict = {}
    down_left: dict = {}
    for (cell, _), (up, down) in snapshot.gsl_edges.items():
        up_left[cell] = up_left.get(cell, 0.0) + up
        down_left[cell] = down_left.get(cell, 0.0) + down
    used_up: dict = {}
    used_down: dict = {}
    dist_cache: dict = {}
    flow_cache: dict = {}

    def fail(d, kind, achieved=None):
        return FeasibilityReport(False, snapshot.slot, d, kind, achieved)

    for d in demands:
        r = requirements.r(d.src, d.dst)
        if r > 0:
            if d.src not in dist_cache:
                dist_cache[d.src] = hop_distances(snapshot, d.src)
            sp = dist_cache[d.src].get(d.dst)
            if sp is None:
                return fail(d, SURVIVABILITY, 0)
            hops = requirements.hop_bound(sp)
            key = (d.src, d.dst, hops)
            if key not in flow_cache or flow_cache[key] < r:
                lg = build_layered_graph(snapshot, d.src, d.dst, hops)
                flow_cache[key] = max_disjoint_paths(lg, limit=r)
            if flow_cache[key] < r:
                return fail(d, SURVIVABILITY, flow_cache[key])

        s = d.size_gbps
        if s > up_left.get(d.src, 0.0) + _EPS:
            return fail(d, UPLINK)
        if s > down_left.get(d.dst, 0.0) + _EPS:
            return fail(d, DOWNLINK)
        up_left[d.src] -= s
        down_left[d.dst] -= s
        used_up[d.src] = used_up.get(d.src, 0.0) + s
        used_down[d.dst] = used_down.get(d.dst, 0.0) + s

    return FeasibilityReport(True, consumed_uplink=used_up, consumed_downlink=used_down)


def feasibility_check(
    config: ConstellationConfig,
    cells,
    demands,
    requirements: Requirements,
    grid: TimeGrid,
    budget: LinkBudget,
) -> FeasibilityReport:
    """Feasible iff every slot passes :func:`check_snapshot`; stops at the first failure."""
    demands = list(demands)
    last = FeasibilityReport(True)
    for t in grid.slots():
        snap = build_snapshot(config, cells, t, grid, budget)
        last = check_snapshot(snap, demands, requirements)
        if not last.feasible:
            log.debug("%dx%d infeasible at slot %d: %s", config.num_orbits,
                      config.sats_per_orbit, t, last.failure_kind)
            return last
    return last
