"""Schedule descriptions and the policies that realise them."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .engine import EagerPolicy, RandomPolicy

MODES = ("eager", "barrier", "exhaustive", "random")


@dataclass(frozen=True)
class Schedule:
    mode: str = "eager"
    barriers: tuple = ()  # extra Barrier values applied on top of the app's own
    seed: int = 0
    focus: str = None  # async construct whose tasks run first (barrier mode)
    defer: bool = False  # other tasks wait while UI work is possible

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValueError(f"unknown schedule mode {self.mode!r}")
        if self.mode == "barrier" and not self.barriers:
            raise ValueError("barrier mode needs at least one barrier")

    def to_json(self) -> dict:
        return {
            "mode": self.mode,
            "barriers": [{"op": b.op, "target": b.target, "point": b.point, "sem": b.sem}
                         for b in self.barriers],
            "seed": self.seed,
            "focus": self.focus,
            "defer": self.defer,
        }

    @classmethod
    def from_json(cls, d: dict) -> "Schedule":
        from ..model import Barrier
        bs = tuple(Barrier(b["op"], b["target"], b["point"], b.get("sem", "s0"))
                   for b in d.get("barriers", []))
        return cls(d.get("mode", "eager"), bs, int(d.get("seed", 0)), d.get("focus"),
                   bool(d.get("defer", False)))


def policy_for(sched: Schedule):
    if sched.mode in ("eager", "barrier"):
        return EagerPolicy(sched.focus, sched.defer)
    if sched.mode == "random":
        return RandomPolicy(random.Random(sched.seed))
    raise ValueError("exhaustive schedules are enumerated by explore_all_schedules, not run")
