"""Simulator for the single-GUI-thread app model."""
from .engine import (
    EXCEPTIONS, CrashReport, LifecycleViolation, SimResult, SimulationError, Simulator, run,
)
from .explore import Exploration, explore_all_schedules
from .instrument import barrier_plan, instrument
from .schedule import Schedule

__all__ = [
    "EXCEPTIONS", "CrashReport", "Exploration", "LifecycleViolation", "Schedule", "SimResult",
    "SimulationError", "Simulator", "barrier_plan", "explore_all_schedules", "instrument", "run",
]
