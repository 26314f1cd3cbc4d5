"""Monkey-style random GUI fuzzing inside the simulator."""
from __future__ import annotations

import random
import string
from dataclasses import dataclass, field

from ..sim.engine import RandomPolicy, Simulator
from ..synth import DEFAULT_ENV, UiEvent

SYSTEM_EVENTS = ("rotate", "home", "back", "screenToggle")
TEXT_ALPHABET = string.ascii_lowercase + string.digits + "@.+"


@dataclass(frozen=True)
class FuzzCrash:
    report: object
    eventsToFirst: int  # 1-based index of the event that first hit the site
    ticks: int  # simulator steps spent before the crash, over all restarts

    def to_json(self) -> dict:
        return {"report": self.report.to_json(), "eventsToFirst": self.eventsToFirst,
                "ticks": self.ticks}


@dataclass
class FuzzResult:
    eventBudget: int
    seed: int
    crashes: list = field(default_factory=list)
    eventsUsed: int = 0
    restarts: int = 0

    @property
    def sites(self) -> set:
        return {c.report.site for c in self.crashes}

    def to_json(self) -> dict:
        return {"eventBudget": self.eventBudget, "seed": self.seed,
                "eventsUsed": self.eventsUsed, "restarts": self.restarts,
                "crashes": [c.to_json() for c in self.crashes]}


class _MonkeySource:
    """Picks the next event from what the current screen offers."""

    def __init__(self, app, rng, budget):
        self.app = app
        self.rng = rng
        self.budget = budget
        self.used = 0
        self.widgets = {}
        for b in app.bindings:
            self.widgets.setdefault(app.method(b.method).owner, []).append(b)

    def has_next(self, sim) -> bool:
        return self.used < self.budget

    def _text(self) -> str:
        n = self.rng.randrange(9)
        return "".join(self.rng.choice(TEXT_ALPHABET) for _ in range(n))

    def next(self, sim) -> UiEvent:
        self.used += 1
        top = sim.stack[-1] if sim.stack else None
        if not sim.running or top is None or top.state == "stopped":
            return UiEvent("launch")
        options = []
        if top.state == "resumed":
            owners = [top] + [f for f in top.fragments if f.state == "resumed"]
            for inst in owners:
                for b in self.widgets.get(inst.comp, ()):
                    options.append(b)
        options += SYSTEM_EVENTS
        pick = options[self.rng.randrange(len(options))]
        if isinstance(pick, str):
            return UiEvent(pick)
        if pick.kind == "item":
            return UiEvent("listItemClick", pick.widget, self.rng.randrange(5))
        if pick.kind == "text":
            return UiEvent("input", pick.widget, text=self._text())
        return UiEvent("click", pick.widget)


def fuzz(app, eventBudget: int, seed: int, env=DEFAULT_ENV, record: bool = False,
         logs=None) -> FuzzResult:
    """Random events and random async timing until the budget is spent.

    A crash restarts the app in a fresh simulator; every distinct crash site
    is kept once, with the event count at its first occurrence.  Recorded
    happens-before logs of each run are appended to `logs` when given.
    """
    if eventBudget < 0:
        raise ValueError("event budget must be non-negative")
    rng = random.Random(seed)
    source = _MonkeySource(app, rng, eventBudget)
    result = FuzzResult(eventBudget, seed)
    ticks = 0
    while source.has_next(None):
        before = source.used
        sim = Simulator(app, env, RandomPolicy(rng), record=record)
        res = sim.run(source)
        ticks += res.ticks
        if logs is not None:
            logs.append(res.hb)
        if res.crash is not None:
            if res.crash.site not in result.sites:
                result.crashes.append(FuzzCrash(res.crash, source.used, ticks))
            result.restarts += 1
        elif source.used == before:
            break  # nothing consumed, nothing left to do
    result.eventsUsed = source.used
    return result
