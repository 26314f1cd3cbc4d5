"""Backward generation of bounded, acyclic call traces from a faulty statement."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .callgraph import CallGraph, callers_of
from .model import App, EnvCondition, EnvIf, TryCatch, fmt_site

PENDING = "pending"
TERMINATED = "terminated"
FAILED = "failed"


@dataclass(frozen=True)
class TraceLimits:
    maxTraceCnt: int = 10
    maxTraceLen: int = 20

    def __post_init__(self):
        if self.maxTraceCnt < 1 or self.maxTraceLen < 1:
            raise ValueError("trace limits must be positive")


@dataclass
class Trace:
    state: str
    ptrMethod: str
    ptrStmt: tuple
    chain: list = field(default_factory=list)
    conditions: list = field(default_factory=list)
    visited: set = field(default_factory=set)

    def fork(self) -> "Trace":
        return replace(self, chain=list(self.chain), conditions=list(self.conditions),
                       visited=set(self.visited))

    def to_json(self) -> dict:
        return {
            "state": self.state,
            "chain": list(self.chain),
            "conditions": [c.to_json() for c in self.conditions],
        }


def enclosing_conditions(app: App, site: tuple) -> list:
    """Environment conditions the statement at `site` is control-dependent on."""
    _, encl = app.flat(site[0])[site[1]]
    out = []
    for c, label in encl:
        if isinstance(c, EnvIf):
            out.append(c.cond if label == "then" else c.cond.negate())
        elif isinstance(c, TryCatch):
            cond = EnvCondition(c.exception)
            out.append(cond if label == "body" else cond.negate())
    return out


def get_acyclic_callers(t: Trace, cg: CallGraph) -> list:
    return [e for e in callers_of(cg, t.ptrMethod) if e.caller not in t.visited]


def update_trace(t: Trace, app: App) -> Trace:
    if t.ptrMethod in app.entry_callbacks():
        t.state = TERMINATED
    t.chain.append(t.ptrMethod)
    t.visited.add(t.ptrMethod)
    if t.ptrStmt is not None:
        for c in enclosing_conditions(app, t.ptrStmt):
            if c not in t.conditions:
                t.conditions.append(c)
    return t


def generate_traces(cg: CallGraph, cand, limits: Optional[TraceLimits] = None) -> list:
    """Backtrack from cand.stmtAccessUI over callers until the entry activity.

    The first caller of a pending trace continues it; every further caller
    forks a copy while fewer than maxTraceCnt traces exist.  Traces still
    pending when the chain length limit is reached are marked failed.
    """
    app = cg.app
    if app is None:
        raise ValueError("call graph carries no app; build it with build_call_graph")
    limits = limits or TraceLimits()
    site = tuple(cand.stmtAccessUI)
    t0 = Trace(PENDING, site[0], site, [site[0]], enclosing_conditions(app, site), {site[0]})
    traces = [t0]
    trace_len = 1
    while trace_len < limits.maxTraceLen:
        pending = [t for t in traces if t.state == PENDING]
        if not pending:
            break
        for t in pending:
            callers = get_acyclic_callers(t, cg)
            if not callers:
                t.state = FAILED
                continue
            base = t.fork()
            for e in callers[1:]:
                if len(traces) >= limits.maxTraceCnt:
                    break
                f = base.fork()
                f.ptrMethod, f.ptrStmt = e.caller, e.site
                traces.append(update_trace(f, app))
            e = callers[0]
            t.ptrMethod, t.ptrStmt = e.caller, e.site
            update_trace(t, app)
        trace_len += 1
    for t in traces:
        if t.state == PENDING:
            t.state = FAILED
    return traces


def handler_projection(t: Trace, app: App) -> list:
    """Event-handler names along the trace, entry side first."""
    out = []
    for mid in reversed(t.chain):
        if app.method(mid).role == "event-handler":
            out.append(app.method(mid).name)
    return out


def traces_to_json(cand, traces) -> dict:
    return {"stmtAccessUI": fmt_site(cand.stmtAccessUI), "traces": [t.to_json() for t in traces]}
