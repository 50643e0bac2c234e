import numpy as np
import pytest

from lsndesign.demands import Demand, Requirements
from lsndesign.feasibility import feasibility_check
from lsndesign.orbits import CellId, ConstellationConfig, SatelliteId, TimeGrid
from lsndesign.resilience import (
    RANDOM,
    SOLAR_STORM,
    FailureScenario,
    apply_failures,
    failed_satellites,
    reachability_ratio,
    resilience_sweep,
)
from lsndesign.topology import LinkBudget, Snapshot, build_snapshot
from scenarios import ISL_CELLS, isl_scenario

GRID = TimeGrid(60.0, 1)


def small_snapshot():
    cfg = ConstellationConfig(53.0, 2, 3, 0, 2000.0)
    return build_snapshot(cfg, [], 0, GRID, LinkBudget(min_los_altitude_km=0.0))


def desk_snapshots(slots=3):
    sc = isl_scenario()
    grid = TimeGrid(sc["grid"].slot_duration_s, slots)
    return [build_snapshot(sc["initial"], sc["cells"], t, grid, sc["budget"]) for t in grid.slots()], sc


def test_scenario_validation():
    with pytest.raises(ValueError):
        FailureScenario(SOLAR_STORM, storm_kill_count=2)
    with pytest.raises(ValueError):
        FailureScenario(SOLAR_STORM, SatelliteId(0, 0), 2, random_fail_prob=0.5)
    with pytest.raises(ValueError):
        FailureScenario(RANDOM)
    with pytest.raises(ValueError):
        FailureScenario(RANDOM, random_fail_prob=1.5)
    with pytest.raises(ValueError):
        FailureScenario(RANDOM, SatelliteId(0, 0), random_fail_prob=0.5)
    with pytest.raises(ValueError):
        FailureScenario("meteor")


def test_no_damage_is_identity():
    snap = small_snapshot()
    for sc in (FailureScenario(SOLAR_STORM, SatelliteId(0, 0), 0), FailureScenario(RANDOM, random_fail_prob=0.0)):
        out = apply_failures(snap, sc)
        assert out.satellites == snap.satellites and out.isl_edges == snap.isl_edges


def test_certain_failure_removes_everything():
    out = apply_failures(small_snapshot(), FailureScenario(RANDOM, random_fail_prob=1.0, rng_seed=3))
    assert out.satellites == () and out.isl_edges == {}


def test_storm_kills_epicenter_and_nearest():
    snap = small_snapshot()
    center = SatelliteId(0, 0)
    dist = {s: float(np.linalg.norm(snap.positions[s] - snap.positions[center])) for s in snap.satellites}
    expected = set(sorted(snap.satellites, key=lambda s: dist[s])[:3])
    gone = failed_satellites(snap, FailureScenario(SOLAR_STORM, center, 3))
    assert set(gone) == expected and center in gone
    out = apply_failures(snap, FailureScenario(SOLAR_STORM, center, 3))
    assert not set(out.satellites) & expected
    assert len(snap.satellites) == 6  # original untouched


def test_storm_errors():
    snap = small_snapshot()
    with pytest.raises(ValueError):
        apply_failures(snap, FailureScenario(SOLAR_STORM, SatelliteId(0, 0), 7))
    with pytest.raises(ValueError):
        apply_failures(snap, FailureScenario(SOLAR_STORM, SatelliteId(5, 5), 1))


def test_random_failures_are_nested_and_reproducible():
    snap = small_snapshot()
    a = failed_satellites(snap, FailureScenario(RANDOM, random_fail_prob=0.3, rng_seed=11))
    b = failed_satellites(snap, FailureScenario(RANDOM, random_fail_prob=0.3, rng_seed=11))
    c = failed_satellites(snap, FailureScenario(RANDOM, random_fail_prob=0.7, rng_seed=11))
    assert a == b and set(a) <= set(c)


def test_reachability_extremes():
    snaps, sc = desk_snapshots(1)
    snap = snaps[0]
    assert reachability_ratio(snap, sc["demands"], 1.5) == 1.0
    dead = snap.without(snap.satellites)
    assert reachability_ratio(dead, sc["demands"], 1.5, baseline=snap) == 0.0
    with pytest.raises(ValueError):
        reachability_ratio(snap, [], 1.5)


def test_losing_all_ingress_satellites():
    cfg = ConstellationConfig(53.0, 2, 3, 0, 2000.0)
    a, b = CellId(30.0, 0.0, 1.0), CellId(-30.0, 60.0, 1.0)
    snap = build_snapshot(cfg, [a, b], 0, GRID, LinkBudget(min_elevation_deg=0.0, min_los_altitude_km=0.0))
    ingress = [s for (c, s) in snap.gsl_edges if c == a]
    assert ingress
    damaged = snap.without(ingress)
    assert reachability_ratio(damaged, [Demand(a, b, 1.0)], 2.0, baseline=snap) == 0.0


def test_hop_bound_uses_pre_failure_shortest_path():
    # a detour of 4 hops around a removed relay: fine for lambda 2, not for 1
    a, b = CellId(0.0, 0.0), CellId(1.0, 1.0)
    dem = [Demand(a, b, 1.0)]
    snap = Snapshot.from_edges([(a, 1), (1, b), (a, 2), (2, 3), (3, 4), (4, b)], cells=[a, b])
    cut = snap.without([1])
    assert reachability_ratio(cut, dem, 1.0, baseline=snap) == 0.0
    assert reachability_ratio(cut, dem, 2.0, baseline=snap) == 1.0
    # measured against itself, the detour is the shortest path
    assert reachability_ratio(cut, dem, 1.0) == 1.0


def test_sweep_rows_and_determinism():
    snaps, sc = desk_snapshots(2)
    rows = resilience_sweep(snaps, sc["demands"], 1.5, SOLAR_STORM, [0, 36], 5, 100)
    assert rows[0].mean_reachability == 1.0 and rows[0].stddev == 0.0
    assert rows[1].mean_reachability == 0.0 and rows[1].trials == 5
    again = resilience_sweep(snaps, sc["demands"], 1.5, RANDOM, [0.0, 0.2, 1.0], 8, 5)
    assert again == resilience_sweep(snaps, sc["demands"], 1.5, RANDOM, [0.0, 0.2, 1.0], 8, 5)
    assert again[0].mean_reachability == 1.0 and again[-1].mean_reachability == 0.0
    with pytest.raises(ValueError):
        resilience_sweep([], sc["demands"], 1.5, RANDOM, [0.1], 3, 0)
    with pytest.raises(ValueError):
        resilience_sweep(snaps, sc["demands"], 1.5, RANDOM, [0.1], 0, 0)


def test_feasible_design_fully_reachable():
    snaps, sc = desk_snapshots(3)
    grid = TimeGrid(sc["grid"].slot_duration_s, 3)
    assert feasibility_check(sc["initial"], ISL_CELLS, sc["demands"], Requirements(1, 1.5), grid, sc["budget"]).feasible
    for s in snaps:
        assert reachability_ratio(s, sc["demands"], 1.5) == 1.0
