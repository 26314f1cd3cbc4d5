"""Stateless enumeration of every async-completion placement for one event sequence."""
from __future__ import annotations

from dataclasses import dataclass, field

from ..synth import DEFAULT_ENV
from .engine import ScriptedPolicy, SimulationError, Simulator


@dataclass
class Exploration:
    outcomes: dict = field(default_factory=dict)  # outcome key -> first SimResult
    runs: int = 0
    complete: bool = True
    results: list = field(default_factory=list)  # every run, when keep_all

    @property
    def crashes(self) -> list:
        return [r.crash for r in self.outcomes.values() if r.crash is not None]

    @property
    def crash_sites(self) -> set:
        return {c.site for c in self.crashes}

    @property
    def only_normal(self) -> bool:
        return all(k == ("ok",) for k in self.outcomes)


def explore_all_schedules(app, seq, env=DEFAULT_ENV, bound: int = 10_000, record: bool = False,
                          keep_all: bool = False, barriers=()) -> Exploration:
    """Depth-first over scheduling decisions by replaying choice prefixes.

    Each decision point offers "next UI step" plus every runnable task; a run
    records (choice, option count) per point and the next prefix bumps the
    deepest choice that still has untried options.
    """
    events = tuple(seq.events if hasattr(seq, "events") else seq)
    for e in events:
        if e.widget is not None and app.binding(e.widget) is None:
            raise SimulationError(f"unresolvable widget {e.widget!r}")
    ex = Exploration()
    prefix: list = []
    while True:
        if ex.runs >= bound:
            ex.complete = False
            break
        policy = ScriptedPolicy(prefix)
        res = Simulator(app, env, policy, record=record, extra_barriers=barriers).run(events)
        ex.runs += 1
        ex.outcomes.setdefault(res.outcome, res)
        if keep_all:
            ex.results.append(res)
        trail = policy.trail
        j = len(trail) - 1
        while j >= 0 and trail[j][0] + 1 >= trail[j][1]:
            j -= 1
        if j < 0:
            break
        prefix = [c for c, _ in trail[:j]] + [trail[j][0] + 1]
    return ex
