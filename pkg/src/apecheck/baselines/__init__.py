"""Comparison baselines: a random GUI fuzzer and a happens-before race detector."""
from .fuzz import FuzzCrash, FuzzResult, fuzz
from .hbkernel import BACKEND
from .races import (
    Access, HBGraph, MalformedLog, RaceReport, build_hb_graph, collect_logs, detect_races,
    detect_races_in, race_sites,
)

__all__ = [
    "BACKEND", "Access", "FuzzCrash", "FuzzResult", "HBGraph", "MalformedLog", "RaceReport",
    "build_hb_graph", "collect_logs", "detect_races", "detect_races_in", "fuzz", "race_sites",
]
