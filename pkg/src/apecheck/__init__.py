"""Detection, trace generation and scheduled replay of async programming errors."""
from .apiconfig import default_api_config, load_api_config, parse_api_config
from .callgraph import CallEdge, CallGraph, build_call_graph, callers_of
from .detector import APECandidate, classify_pattern, detect_apes, is_guarded
from .dsl import Diagnostic, ParseError, format_app, load_app, parse_app
from .synth import (
    Environment, EventSequence, UiEvent, UnmappableTrace, UnsatisfiableEnvironment,
    infer_environment, synthesize_events,
)
from .traces import Trace, TraceLimits, generate_traces
from .validate import validate_app

__all__ = [
    "APECandidate", "CallEdge", "CallGraph", "Diagnostic", "Environment", "EventSequence",
    "ParseError", "Trace", "TraceLimits", "UiEvent", "UnmappableTrace", "UnsatisfiableEnvironment",
    "build_call_graph", "callers_of", "classify_pattern", "default_api_config", "detect_apes",
    "format_app", "generate_traces", "infer_environment", "is_guarded", "load_api_config",
    "load_app", "parse_api_config", "parse_app", "synthesize_events", "validate_app",
]
