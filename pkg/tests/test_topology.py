import math
from collections import Counter

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lsndesign.demands import uniform_cell_grid
from lsndesign.orbits import CellId, ConstellationConfig, SatelliteId, TimeGrid, gsl_visible, isl_visible
from lsndesign.topology import (
    LinkBudget,
    Snapshot,
    UnsupportedConfigurationError,
    build_snapshot,
    plus_grid_pairs,
    shortest_hops,
)

GRID = TimeGrid(60.0, 5)


def grid_graph(o, m):
    return Snapshot.from_edges(plus_grid_pairs(o, m))


def isl_degrees(snap):
    deg = Counter()
    for a, b in snap.isl_edges:
        deg[a] += 1
        deg[b] += 1
    return deg


def test_two_planes_of_three_have_degree_three():
    # wiring only: at this size the chords would dip below the horizon
    snap = grid_graph(2, 3)
    deg = isl_degrees(snap)
    assert len(snap.isl_edges) == 9
    assert all(deg[s] == 3 for s in snap.satellites)


def test_single_plane_is_a_ring():
    snap = grid_graph(1, 4)
    assert all(d == 2 for d in isl_degrees(snap).values())
    assert len(snap.isl_edges) == 4


def test_five_by_five_torus():
    cfg = ConstellationConfig(53.0, 5, 5, 0, 2000.0)
    snap = build_snapshot(cfg, [], 0, GRID, LinkBudget(min_los_altitude_km=0.0))
    assert len(snap.isl_edges) == 2 * 5 * 5 == 50
    assert set(isl_degrees(snap).values()) == {4}


def test_every_isl_is_visible_and_degree_bounded():
    cfg = ConstellationConfig(60.0, 4, 8, 1, 550.0)
    for t in range(3):
        snap = build_snapshot(cfg, [], t, GRID, LinkBudget())
        for a, b in snap.isl_edges:
            assert isl_visible(a, b, t, cfg, GRID)
        assert max(isl_degrees(snap).values(), default=0) <= 4


def test_gsl_edges_visible_and_capacity_capped():
    cfg = ConstellationConfig(53.0, 4, 6, 1, 1200.0)
    cells = uniform_cell_grid(10.0, 10.0, 1.0, lat_limit=60.0)
    budget = LinkBudget(gsl_capacity_gbps=4.0, sat_max_uplink_gbps=12.0, sat_max_downlink_gbps=12.0,
                        min_elevation_deg=10.0)
    snap = build_snapshot(cfg, cells, 2, GRID, budget)
    up = Counter()
    down = Counter()
    for (cell, sat), (u, d) in snap.gsl_edges.items():
        assert gsl_visible(cell, sat, 2, cfg, GRID, 10.0)
        up[sat] += u
        down[sat] += d
    assert snap.gsl_edges
    assert max(up.values()) <= 12.0 and max(down.values()) <= 12.0
    # with a dense grid the cap binds: three beams per satellite
    assert max(up.values()) == 12.0


def test_nearest_cells_win_when_budget_binds():
    cfg = ConstellationConfig(0.001, 1, 1, 0, 1500.0)
    near, mid, far = CellId(0.0, 0.0), CellId(0.0, 5.0), CellId(0.0, 10.0)
    budget = LinkBudget(gsl_capacity_gbps=4.0, sat_max_uplink_gbps=8.0, sat_max_downlink_gbps=8.0,
                        min_elevation_deg=0.0)
    snap = build_snapshot(cfg, [far, near, mid], 0, GRID, budget)
    assert {c for c, _ in snap.gsl_edges} == {near, mid}


def test_only_plus_grid_is_supported():
    with pytest.raises(UnsupportedConfigurationError):
        build_snapshot(ConstellationConfig(53.0, 2, 2), [], 0, GRID, LinkBudget(n_isl=3))


def test_build_snapshot_is_deterministic():
    cfg = ConstellationConfig(53.0, 3, 5, 2, 800.0)
    cells = [CellId(10.0, 20.0, 5.0), CellId(-20.0, 40.0, 1.0)]
    a = build_snapshot(cfg, cells, 3, GRID, LinkBudget(min_elevation_deg=5.0))
    b = build_snapshot(cfg, cells, 3, GRID, LinkBudget(min_elevation_deg=5.0))
    assert a.isl_edges == b.isl_edges and a.gsl_edges == b.gsl_edges


def test_link_budget_validation():
    with pytest.raises(ValueError):
        LinkBudget(gsl_capacity_gbps=0.0)
    with pytest.raises(ValueError):
        LinkBudget(min_elevation_deg=91.0)


def test_shortest_hops_basics():
    ring = grid_graph(1, 6)
    s = SatelliteId
    assert shortest_hops(ring, s(0, 2), s(0, 2)) == 0
    assert shortest_hops(ring, s(0, 0), s(0, 3)) == 3
    with pytest.raises(ValueError):
        shortest_hops(ring, s(0, 0), s(4, 4))
    split = Snapshot.from_edges([("a", "b"), ("c", "d")])
    assert shortest_hops(split, "a", "d") is None


def test_torus_diameter_six_by_six():
    g = grid_graph(6, 6)
    sats = g.satellites
    worst = max(shortest_hops(g, a, b) for a in sats for b in sats)
    assert worst <= math.ceil((6 + 6) / 2)


def test_without_removes_incident_links():
    snap = Snapshot.from_edges([("c", 1), (1, 2), (2, 3), ("d", 3)], cells=["c", "d"])
    cut = snap.without([2])
    assert 2 not in cut.adjacency
    assert cut.isl_edges == {}
    assert shortest_hops(cut, "c", "d") is None
    assert shortest_hops(snap, "c", "d") == 4


@settings(max_examples=25, deadline=None)
@given(o=st.integers(1, 9), m=st.integers(1, 9))
def test_plus_grid_pairs_degree(o, m):
    deg = Counter()
    pairs = plus_grid_pairs(o, m)
    assert len(pairs) == len(set(pairs))
    for a, b in pairs:
        deg[a] += 1
        deg[b] += 1
    assert max(deg.values(), default=0) <= 4
    if o >= 3 and m >= 3:
        assert len(pairs) == 2 * o * m
