"""Satellite failure injection and post-failure reachability."""
from __future__ import annotations

import statistics
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .demands import Requirements
from .orbits import SatelliteId
from .topology import Snapshot, hop_distances

SOLAR_STORM = "solar_storm"
RANDOM = "random"


@dataclass(frozen=True)
class FailureScenario:
    model: str
    storm_epicenter: SatelliteId | None = None
    storm_kill_count: int | None = None
    random_fail_prob: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        if self.model == SOLAR_STORM:
            if self.storm_epicenter is None or self.storm_kill_count is None:
                raise ValueError("solar_storm needs an epicenter and a kill count")
            if self.random_fail_prob is not None:
                raise ValueError("solar_storm takes no failure probability")
            if self.storm_kill_count < 0:
                raise ValueError("kill count must be non-negative")
        elif self.model == RANDOM:
            if self.random_fail_prob is None:
                raise ValueError("random model needs a failure probability")
            if self.storm_epicenter is not None or self.storm_kill_count is not None:
                raise ValueError("random model takes no storm fields")
            if not 0.0 <= self.random_fail_prob <= 1.0:
                raise ValueError(f"probability {self.random_fail_prob} outside [0, 1]")
        else:
            raise ValueError(f"unknown failure model {self.model!r}")


def failed_satellites(snapshot: Snapshot, scenario: FailureScenario) -> list:
    """Satellites destroyed by ``scenario`` given the geometry at this slot."""
    sats = list(snapshot.satellites)
    if scenario.model == SOLAR_STORM:
        k = scenario.storm_kill_count
        if k > len(sats):
            raise ValueError(f"kill count {k} exceeds {len(sats)} satellites")
        center = scenario.storm_epicenter
        if center not in snapshot.positions:
            raise ValueError(f"epicenter {center} not in snapshot")
        if k == 0:
            return []
        origin = snapshot.positions[center]
        dist = [float(np.linalg.norm(snapshot.positions[s] - origin)) for s in sats]
        # stable sort keeps the epicenter (distance 0) first, ties by satellite order
        order = sorted(range(len(sats)), key=lambda i: (dist[i], sats[i] != center, i))
        return [sats[i] for i in order[:k]]
    # one uniform draw per satellite so larger probabilities fail a superset
    draws = np.random.default_rng(scenario.rng_seed).random(len(sats))
    return [s for s, u in zip(sats, draws) if u < scenario.random_fail_prob]


def apply_failures(snapshot: Snapshot, scenario: FailureScenario) -> Snapshot:
    return snapshot.without(failed_satellites(snapshot, scenario))


def reachability_ratio(damaged: Snapshot, demands, lam: float, baseline: Snapshot | None = None) -> float:
    """Share of demands still joined by a path within ``ceil(lam * L_sp)`` hops.

    ``L_sp`` is measured on ``baseline`` (the pre-failure snapshot); without
    one, the damaged snapshot's own shortest paths are used.
    """
    demands = list(demands)
    if not demands:
        raise ValueError("need at least one demand")
    req = Requirements(lam=lam)
    reference = baseline if baseline is not None else damaged
    reached = 0
    cache: dict = {}
    for d in demands:
        if d.src not in cache:
            cache[d.src] = hop_distances(reference, d.src)
        sp = cache[d.src].get(d.dst)
        if sp is None:
            continue
        bound = req.hop_bound(sp)
        got = hop_distances(damaged, d.src, limit=bound).get(d.dst)
        if got is not None and got <= bound:
            reached += 1
    return reached / len(demands)


class SeverityRow(NamedTuple):
    severity: float
    mean_reachability: float
    stddev: float
    trials: int


def resilience_sweep(snapshots, demands, lam: float, model: str, levels, trials: int,
                     base_seed: int) -> list[SeverityRow]:
    """Mean/stddev reachability per severity level over seeded trials.

    The failed set of each trial is drawn on the first snapshot and stays
    failed in every later slot; a trial's score is its mean over slots.
    Trial ``k`` uses the same seed at every level, so damage is nested
    across levels.
    """
    snapshots = list(snapshots)
    if not snapshots:
        raise ValueError("need at least one snapshot")
    if trials < 1:
        raise ValueError("need at least one trial")
    first = snapshots[0]
    rows = []
    for level in levels:
        scores = []
        for k in range(trials):
            seed = base_seed + k
            if model == SOLAR_STORM:
                sats = list(first.satellites)
                center = sats[int(np.random.default_rng(seed).integers(len(sats)))]
                scenario = FailureScenario(SOLAR_STORM, center, int(level), rng_seed=seed)
            else:
                scenario = FailureScenario(RANDOM, random_fail_prob=float(level), rng_seed=seed)
            gone = failed_satellites(first, scenario)
            per_slot = [reachability_ratio(s.without(gone), demands, lam, baseline=s) for s in snapshots]
            scores.append(sum(per_slot) / len(per_slot))
        std = statistics.pstdev(scores) if len(scores) > 1 else 0.0
        rows.append(SeverityRow(float(level), sum(scores) / len(scores), std, trials))
    return rows
