"""P/V barrier placement that forces the schedule a candidate needs."""
from __future__ import annotations

from dataclasses import replace

from ..model import App, Barrier, FragmentTransaction


def barrier_plan(app: App, cand) -> tuple:
    """(P, V) barriers for a candidate.

    P3 parks the async at the end of its background slot and releases it when
    its owner starts onDestroy, or onStop for a fragment commit (state loss).
    P1/P2 park right before the offending statement and release at the
    owner's onResume, which only delays the violation.
    """
    a = app.async_(cand.asyncId)
    sem = f"ape:{cand.stmtAccessUI[0]}:{cand.stmtAccessUI[1]}"
    if cand.pattern == "P3":
        p = Barrier("P", a.slot("background").id, "end", sem)
        stmt = app.stmt_at(cand.stmtAccessUI)
        cb = "onStop" if isinstance(stmt, FragmentTransaction) else "onDestroy"
        return p, Barrier("V", a.owner, cb, sem)
    p = Barrier("P", cand.stmtAccessUI[0], cand.stmtAccessUI[1], sem)
    return p, Barrier("V", a.owner, "onResume", sem)


def instrument(app: App, cand) -> App:
    return replace(app, barriers=app.barriers + barrier_plan(app, cand))
