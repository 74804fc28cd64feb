"""Hard internal-short simulation for parallel Li-ion packs with force/CO2 fault detection."""

from packisc.detection import Decision, ObserverState, Thresholds, detect_stream, fuse
from packisc.scenario import Scenario, load_scenario, run

__all__ = [
    "Decision",
    "ObserverState",
    "Scenario",
    "Thresholds",
    "detect_stream",
    "fuse",
    "load_scenario",
    "run",
]
__version__ = "0.1.0"
