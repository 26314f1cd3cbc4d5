"""Per-candidate pipeline: traces, events, environment, instrumentation, replay."""
from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Optional

from .callgraph import build_call_graph
from .detector import detect_apes
from .sim import Schedule, barrier_plan, run
from .synth import (
    BACK, Environment, UiEvent, UnmappableTrace, UnsatisfiableEnvironment, infer_environment,
    synthesize_events,
)
from .traces import TERMINATED, TraceLimits, enclosing_conditions, generate_traces

CONFIRMED = "confirmed"
NOT_REPRODUCED = "not-reproduced"
UNMAPPABLE = "unmappable"
UNSATISFIABLE = "unsatisfiable-environment"
TRACE_FAILED = "trace-failed"


@dataclass
class TestCase:
    __test__ = False  # not a pytest class

    events: tuple
    environment: object
    schedule: Schedule

    @classmethod
    def from_json(cls, d: dict) -> "TestCase":
        return cls(tuple(UiEvent.from_json(e) for e in d["events"]),
                   Environment.from_json(d.get("environment", {})),
                   Schedule.from_json(d.get("schedule", {})))

    def to_json(self) -> dict:
        return {
            "events": [e.to_json() for e in self.events],
            "environment": self.environment.to_json(),
            "schedule": self.schedule.to_json(),
        }


@dataclass
class VerificationOutcome:
    candidate: object
    status: str
    report: Optional[object] = None
    testCase: Optional[TestCase] = None
    collateral: list = field(default_factory=list)  # crashes at other sites

    def to_json(self) -> dict:
        return {
            "candidate": self.candidate.to_json(),
            "status": self.status,
            "report": self.report.to_json() if self.report else None,
            "testCase": self.testCase.to_json() if self.testCase else None,
            "collateral": [c.to_json() for c in self.collateral],
        }


MAX_REPAIRS = 3
MAX_ENVS = 4


def _navigate(events: tuple, dropped: tuple) -> Optional[tuple]:
    """Insert a back press before the first dropped event, or None if nothing was dropped."""
    if not dropped:
        return None
    i = dropped[0]
    return events[:i] + (BACK,) + events[i:]


def _attempts(t, app, cand, env, schedules):
    """Crashing runs of one trace under each schedule, with navigation repair."""
    base = synthesize_events(t, app, cand, env).events
    for sched in schedules:
        events = base
        for _ in range(MAX_REPAIRS + 1):
            res = run(app, events, env, sched)
            if res.crash is not None:
                yield res, events, sched
                break
            events = _navigate(events, res.dropped)
            if events is None:
                break


def _avoiding(t, app, site) -> list:
    """Environments that keep the trace's conditions but skip a collateral crash site."""
    out = []
    for c in enclosing_conditions(app, site):
        alt = replace(t, conditions=t.conditions + [c.negate()])
        try:
            out.append(infer_environment(alt, app))
        except UnsatisfiableEnvironment:
            pass
    return out


def verify(app, cand, limits: Optional[TraceLimits] = None, cg=None) -> VerificationOutcome:
    """Replay each terminated trace, shortest first, until the candidate's site crashes.

    Each trace is tried under two barrier schedules: eager, with the
    candidate's construct first, and one that also defers other constructs
    while UI work is pending.  When the simulator drops an event because its
    widget is not on screen, a back press is inserted before it and the run
    is repeated (a bounded navigation repair).
    """
    cg = cg or build_call_graph(app)
    traces = [t for t in generate_traces(cg, cand, limits) if t.state == TERMINATED]
    if not traces:
        return VerificationOutcome(cand, TRACE_FAILED)
    traces.sort(key=lambda t: len(t.chain))
    plan = barrier_plan(app, cand)
    schedules = (Schedule("barrier", plan, focus=cand.asyncId),
                 Schedule("barrier", plan, focus=cand.asyncId, defer=True))
    mapped = satisfiable = False
    collateral = []
    for t in traces:
        try:
            synthesize_events(t, app, cand)
        except UnmappableTrace:
            continue
        mapped = True
        try:
            env = infer_environment(t, app)
        except UnsatisfiableEnvironment:
            continue
        satisfiable = True
        envs = [env]
        k = 0
        while k < len(envs) and k < MAX_ENVS:
            env = envs[k]
            k += 1
            for res, events, sched in _attempts(t, app, cand, env, schedules):
                if res.crash.site == tuple(cand.stmtAccessUI):
                    return VerificationOutcome(cand, CONFIRMED, res.crash,
                                               TestCase(events, env, sched), collateral)
                if res.crash not in collateral:
                    collateral.append(res.crash)
                for alt in _avoiding(t, app, res.crash.site):
                    if alt not in envs:
                        envs.append(alt)
    if not mapped:
        return VerificationOutcome(cand, UNMAPPABLE, collateral=collateral)
    if not satisfiable:
        return VerificationOutcome(cand, UNSATISFIABLE, collateral=collateral)
    return VerificationOutcome(cand, NOT_REPRODUCED, collateral=collateral)


def synthesized_tests(app, limits: Optional[TraceLimits] = None) -> list:
    """(events, environment) for every mappable, satisfiable trace of every candidate."""
    cg = build_call_graph(app)
    out = []
    for cand in detect_apes(app, cg):
        for t in generate_traces(cg, cand, limits):
            if t.state != TERMINATED:
                continue
            try:
                env = infer_environment(t, app)
                seq = synthesize_events(t, app, cand, env)
            except (UnmappableTrace, UnsatisfiableEnvironment):
                continue
            if (seq.events, env) not in out:
                out.append((seq.events, env))
    return out


def replay(app, tc: TestCase):
    """Re-run a stored test case; its schedule carries the barriers."""
    return run(app, tc.events, tc.environment, tc.schedule)


@dataclass
class Summary:
    app: str
    outcomes: list

    @property
    def detected(self) -> int:
        return len(self.outcomes)

    @property
    def processed(self) -> int:
        return sum(o.status in (CONFIRMED, NOT_REPRODUCED, UNSATISFIABLE) for o in self.outcomes)

    @property
    def reproduced(self) -> int:
        return sum(o.status == CONFIRMED for o in self.outcomes)

    @property
    def env_blocked(self) -> int:
        return sum(o.status == UNSATISFIABLE for o in self.outcomes)

    @property
    def fp_suspects(self) -> int:
        return self.processed - self.reproduced - self.env_blocked

    def to_json(self) -> dict:
        return {
            "app": self.app,
            "detected": self.detected,
            "processed": self.processed,
            "reproduced": self.reproduced,
            "falsePositiveSuspects": self.fp_suspects,
            "outcomes": [o.to_json() for o in self.outcomes],
        }


def verify_all(app, limits: Optional[TraceLimits] = None, jobs: int = 1) -> Summary:
    cg = build_call_graph(app)
    cands = detect_apes(app, cg)
    if jobs > 1 and len(cands) > 1:
        from concurrent.futures import ProcessPoolExecutor
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(verify, [app] * len(cands), cands, [limits] * len(cands)))
    else:
        outcomes = [verify(app, c, limits, cg) for c in cands]
    return Summary(app.name, outcomes)
