"""Walker Delta propagation and line-of-sight geometry.

Circular two-body orbits over a spherical, uniformly rotating Earth. All
positions are inertial-frame vectors in kilometres. At elapsed time zero,
orbit 0 slot 0 sits at RAAN 0 / anomaly 0 on the +x axis, and so does the
ground point at longitude 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace
from typing import NamedTuple

import numpy as np

R_EARTH_KM = 6371.0
MU_KM3_S2 = 3.986004418e5
SIDEREAL_DAY_S = 86164.0
EARTH_RATE_RAD_S = 2.0 * math.pi / SIDEREAL_DAY_S


@dataclass(frozen=True)
class ConstellationConfig:
    """Walker Delta shell ``[Inc, O, M, H]`` at a given altitude."""

    inclination_deg: float
    num_orbits: int
    sats_per_orbit: int
    phasing: int = 0
    altitude_km: float = 550.0
    epoch_s: float = 0.0

    def __post_init__(self):
        if self.num_orbits < 1 or self.sats_per_orbit < 1:
            raise ValueError(
                f"need at least one orbit and one satellite per orbit, "
                f"got O={self.num_orbits}, M={self.sats_per_orbit}"
            )
        if not 0 <= self.phasing < self.num_orbits * self.sats_per_orbit:
            raise ValueError(f"phasing {self.phasing} outside [0, {self.n_sats})")
        if not 0.0 < self.inclination_deg <= 180.0:
            raise ValueError(f"inclination {self.inclination_deg} outside (0, 180]")
        if self.altitude_km <= 0.0:
            raise ValueError(f"altitude must be positive, got {self.altitude_km}")

    @property
    def n_sats(self) -> int:
        return self.num_orbits * self.sats_per_orbit

    @property
    def radius_km(self) -> float:
        return R_EARTH_KM + self.altitude_km

    @property
    def mean_motion(self) -> float:
        """Mean motion in rad/s."""
        return math.sqrt(MU_KM3_S2 / self.radius_km**3)

    @property
    def period_s(self) -> float:
        return 2.0 * math.pi * math.sqrt(self.radius_km**3 / MU_KM3_S2)

    def reshaped(self, num_orbits: int, sats_per_orbit: int) -> "ConstellationConfig":
        """Same shell with a new orbit/slot count; phasing wraps modulo the new size."""
        n = num_orbits * sats_per_orbit
        return replace(
            self,
            num_orbits=num_orbits,
            sats_per_orbit=sats_per_orbit,
            phasing=self.phasing % n if n > 0 else 0,
        )

    def satellites(self) -> list["SatelliteId"]:
        return [SatelliteId(o, m) for o in range(self.num_orbits) for m in range(self.sats_per_orbit)]


class SatelliteId(NamedTuple):
    orbit: int
    slot: int


@dataclass(frozen=True)
class CellId:
    """A terrestrial service cell."""

    lat_deg: float
    lon_deg: float
    population: float = 0.0
    service_available: bool = True

    def __post_init__(self):
        if not -90.0 <= self.lat_deg <= 90.0:
            raise ValueError(f"latitude {self.lat_deg} outside [-90, 90]")
        if not -180.0 <= self.lon_deg < 180.0:
            raise ValueError(f"longitude {self.lon_deg} outside [-180, 180)")
        if self.population < 0:
            raise ValueError(f"negative population {self.population}")

    @property
    def key(self) -> tuple[float, float]:
        return (self.lat_deg, self.lon_deg)


@dataclass(frozen=True)
class TimeGrid:
    slot_duration_s: float = 60.0
    num_slots: int = 1

    def __post_init__(self):
        if self.slot_duration_s <= 0:
            raise ValueError(f"slot duration must be positive, got {self.slot_duration_s}")
        if self.num_slots < 1:
            raise ValueError(f"need at least one slot, got {self.num_slots}")

    def elapsed(self, t: int) -> float:
        return t * self.slot_duration_s

    def slots(self) -> range:
        return range(self.num_slots)

    @classmethod
    def regression_period(cls, slot_duration_s: float = 60.0) -> "TimeGrid":
        """Grid spanning one sidereal day.

        Without perturbations the inertial Walker pattern is periodic in
        T_orbit / M, so the Earth-relative geometry recurs (to slot
        resolution) once the ground has turned a full revolution.
        """
        return cls(slot_duration_s, max(1, math.ceil(SIDEREAL_DAY_S / slot_duration_s)))


def _check_sat(config: ConstellationConfig, sat: SatelliteId) -> None:
    o, m = sat
    if not (0 <= o < config.num_orbits and 0 <= m < config.sats_per_orbit):
        raise ValueError(f"satellite {sat} not in {config.num_orbits}x{config.sats_per_orbit} constellation")


def _orbit_angles(config: ConstellationConfig, orbit, slot, elapsed_s: float):
    """RAAN and argument of latitude (radians); accepts scalars or arrays."""
    o_count, m_count = config.num_orbits, config.sats_per_orbit
    raan = 2.0 * math.pi * np.asarray(orbit, dtype=float) / o_count
    anomaly0 = (
        2.0 * math.pi * np.asarray(slot, dtype=float) / m_count
        + config.phasing * 2.0 * math.pi * np.asarray(orbit, dtype=float) / (o_count * m_count)
    )
    return raan, anomaly0 + config.mean_motion * (config.epoch_s + elapsed_s)


def _to_inertial(radius: float, inc_rad: float, raan, u) -> np.ndarray:
    cos_u, sin_u = np.cos(u), np.sin(u)
    cos_r, sin_r = np.cos(raan), np.sin(raan)
    cos_i, sin_i = math.cos(inc_rad), math.sin(inc_rad)
    x = radius * (cos_r * cos_u - sin_r * sin_u * cos_i)
    y = radius * (sin_r * cos_u + cos_r * sin_u * cos_i)
    z = radius * sin_u * sin_i
    return np.stack([x, y, z], axis=-1)


def satellite_position_at(config: ConstellationConfig, sat: SatelliteId, elapsed_s: float) -> np.ndarray:
    """Inertial position of ``sat`` after ``elapsed_s`` seconds."""
    _check_sat(config, sat)
    raan, u = _orbit_angles(config, sat[0], sat[1], elapsed_s)
    return _to_inertial(config.radius_km, math.radians(config.inclination_deg), raan, u)


def satellite_position(config: ConstellationConfig, sat: SatelliteId, t: int, grid: TimeGrid) -> np.ndarray:
    return satellite_position_at(config, sat, grid.elapsed(t))


def satellite_positions(config: ConstellationConfig, t: int, grid: TimeGrid) -> np.ndarray:
    """All satellite positions at slot ``t`` as an ``(O, M, 3)`` array."""
    orbit, slot = np.meshgrid(np.arange(config.num_orbits), np.arange(config.sats_per_orbit), indexing="ij")
    raan, u = _orbit_angles(config, orbit, slot, grid.elapsed(t))
    return _to_inertial(config.radius_km, math.radians(config.inclination_deg), raan, u)


def cell_position_at(cell: CellId, elapsed_s: float) -> np.ndarray:
    lat = math.radians(cell.lat_deg)
    lon = math.radians(cell.lon_deg) + EARTH_RATE_RAD_S * elapsed_s
    return np.array([
        R_EARTH_KM * math.cos(lat) * math.cos(lon),
        R_EARTH_KM * math.cos(lat) * math.sin(lon),
        R_EARTH_KM * math.sin(lat),
    ])


def cell_position(cell: CellId, t: int, grid: TimeGrid) -> np.ndarray:
    return cell_position_at(cell, grid.elapsed(t))


def cell_positions(cells, t: int, grid: TimeGrid) -> np.ndarray:
    if not cells:
        return np.zeros((0, 3))
    return np.array([cell_position(c, t, grid) for c in cells])


def elevation_deg(ground: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Elevation of ``target`` above the local horizon at ``ground``.

    Broadcasts: ``ground`` (..., 3) against ``target`` (..., 3).
    """
    ground = np.asarray(ground, dtype=float)
    los = np.asarray(target, dtype=float) - ground
    up = ground / np.linalg.norm(ground, axis=-1, keepdims=True)
    sin_el = np.sum(los * up, axis=-1) / np.linalg.norm(los, axis=-1)
    return np.degrees(np.arcsin(np.clip(sin_el, -1.0, 1.0)))


def segment_clearance_km(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Minimum distance from Earth's centre to the segment ``a``-``b``."""
    a = np.asarray(a, dtype=float)
    d = np.asarray(b, dtype=float) - a
    dd = np.sum(d * d, axis=-1)
    s = np.clip(-np.sum(a * d, axis=-1) / np.where(dd > 0, dd, 1.0), 0.0, 1.0)
    closest = a + s[..., None] * d
    return np.linalg.norm(closest, axis=-1)


def gsl_visible(
    cell: CellId,
    sat: SatelliteId,
    t: int,
    config: ConstellationConfig,
    grid: TimeGrid,
    min_elevation_deg: float = 25.0,
) -> bool:
    el = elevation_deg(cell_position(cell, t, grid), satellite_position(config, sat, t, grid))
    return bool(el >= min_elevation_deg)


def isl_visible(
    sat_a: SatelliteId,
    sat_b: SatelliteId,
    t: int,
    config: ConstellationConfig,
    grid: TimeGrid,
    min_los_altitude_km: float = 80.0,
) -> bool:
    if tuple(sat_a) == tuple(sat_b):
        raise ValueError("an inter-satellite link needs two distinct satellites")
    pa = satellite_position(config, sat_a, t, grid)
    pb = satellite_position(config, sat_b, t, grid)
    return bool(segment_clearance_km(pa, pb) >= R_EARTH_KM + min_los_altitude_km)
