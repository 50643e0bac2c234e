"""Requirement-driven sizing of LEO satellite constellations."""
from .demands import Demand, Requirements, generate_demands, load_cells
from .feasibility import FeasibilityReport, feasibility_check
from .megareduce import SearchResult, get_survivable_bound, search
from .orbits import CellId, ConstellationConfig, SatelliteId, TimeGrid
from .topology import LinkBudget, Snapshot, build_snapshot

__version__ = "0.1.0"

__all__ = [
    "CellId", "ConstellationConfig", "Demand", "FeasibilityReport", "LinkBudget", "Requirements",
    "SatelliteId", "SearchResult", "Snapshot", "TimeGrid", "build_snapshot", "feasibility_check",
    "generate_demands", "get_survivable_bound", "load_cells", "search",
]
