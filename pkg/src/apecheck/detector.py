"""Static detection of unguarded UI accesses reachable from async constructs.

Every method reached from an async construct is scanned in one of two modes:

* ``async``: the code runs on the async thread (background slot and whatever
  it calls).  Any UI access, fragment commit or UI creation outside a
  post-to-UI block violates the single-thread rule.
* ``stale``: the code runs on the UI thread once the async returns (task and
  loader postExecute).  The captured component may be gone by then, so UI
  accesses and commits are unsafe unless a liveness check guards them.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .callgraph import CallGraph
from .model import (
    App, Call, FragmentTransaction, PostToUi, StartAsync, UiAccess, UiCreate, UiSafeCheckIf,
    fmt_site,
)

ASYNC = "async"
STALE = "stale"


@dataclass(frozen=True)
class APECandidate:
    asyncId: str
    methodStartThread: str
    stmtStartThread: tuple
    methodAccessUI: str
    stmtAccessUI: tuple
    pattern: str
    path: tuple = field(default=(), compare=False)  # callback-to-method witness

    def to_json(self) -> dict:
        return {
            "asyncId": self.asyncId,
            "methodStartThread": self.methodStartThread,
            "stmtStartThread": fmt_site(self.stmtStartThread),
            "methodAccessUI": self.methodAccessUI,
            "stmtAccessUI": fmt_site(self.stmtAccessUI),
            "pattern": self.pattern,
        }


def alive_branch(app: App, stmt: UiSafeCheckIf) -> str:
    """Which branch of a liveness check runs while the component is alive."""
    true_when_dead = stmt.check in app.api.dead_probes
    return "else" if true_when_dead != stmt.negated else "then"


def _is_guard(app: App, compound, label: str, mode: str) -> bool:
    if isinstance(compound, PostToUi):
        return True
    if isinstance(compound, UiSafeCheckIf) and mode == STALE:
        return label == alive_branch(app, compound)
    return False


def classify_pattern(app: App, stmt, mode: str) -> str:
    if mode == ASYNC:
        if isinstance(stmt, UiCreate):
            return "P2"
        if isinstance(stmt, (UiAccess, FragmentTransaction)):
            return "P1"
    elif mode == STALE and isinstance(stmt, (UiAccess, FragmentTransaction)):
        return "P3"
    raise ValueError(f"statement {stmt!r} is not offending in {mode} mode")


def _offending(stmt, mode: str) -> bool:
    if mode == ASYNC:
        return isinstance(stmt, (UiAccess, UiCreate, FragmentTransaction))
    return isinstance(stmt, (UiAccess, FragmentTransaction))


def reachable_starts(app: App, cg: CallGraph) -> list:
    """(method, index, async id) of StartAsync sites reachable from the entry onCreate."""
    entry = app.component(app.entry)
    root = entry.lifecycle_callbacks.get("onCreate") if entry is not None else None
    if root is None:
        return []
    reach = cg.reachable_from(root.id)
    out = []
    for mid in app.methods:
        if mid not in reach:
            continue
        for i, (s, _) in enumerate(app.flat(mid)):
            if isinstance(s, StartAsync):
                out.append((mid, i, s.async_id))
    return out


def _scan(app: App, roots, guards: bool = True) -> list:
    """BFS over (method, mode) states; returns (site, mode, path) of offending statements."""
    hits = []
    parent = {r: None for r in roots}
    todo = deque(roots)
    while todo:
        state = todo.popleft()
        mid, mode = state
        for i, (s, encl) in enumerate(app.flat(mid)):
            if guards and any(_is_guard(app, c, lab, mode) for c, lab in encl):
                continue
            if _offending(s, mode):
                path = []
                cur = state
                while cur is not None:
                    path.append(cur[0])
                    cur = parent[cur]
                hits.append(((mid, i), mode, tuple(reversed(path))))
            nxt = None
            if isinstance(s, Call):
                nxt = (s.target, mode)
            elif isinstance(s, StartAsync):
                pre = app.async_(s.async_id).slot("preExecute")
                if pre is not None:
                    nxt = (pre.id, mode)
            if nxt is not None and nxt not in parent:
                parent[nxt] = state
                todo.append(nxt)
    return hits


def _roots(app: App, aid: str) -> list:
    a = app.async_(aid)
    roots = []
    bg = a.slot("background")
    if bg is not None:
        roots.append((bg.id, ASYNC))
    post = a.slot("postExecute")
    if post is not None and a.kind in ("task", "loader"):
        roots.append((post.id, STALE))
    return roots


def detect_apes(app: App, cg: CallGraph, guards: bool = True) -> list:
    """Candidates in discovery order, one per offending site.

    With guards=False protections are ignored, which yields the sites a
    compliant app would violate without them (used to instrument it).
    """
    starts = reachable_starts(app, cg)
    first_start: dict = {}
    for mid, i, aid in starts:
        first_start.setdefault(aid, (mid, i))
    found: dict = {}
    for aid, (smid, si) in first_start.items():
        for site, mode, path in _scan(app, _roots(app, aid), guards):
            if site in found:
                continue
            stmt = app.stmt_at(site)
            found[site] = APECandidate(aid, smid, (smid, si), site[0], site,
                                       classify_pattern(app, stmt, mode), path)
    return list(found.values())


def offending_sites(app: App, cg: CallGraph) -> set:
    return {c.stmtAccessUI for c in detect_apes(app, cg)}


def is_guarded(app: App, stmt: tuple, cg: CallGraph) -> bool:
    """True when no async-reachable path executes the statement unprotected."""
    return tuple(stmt) not in offending_sites(app, cg)


def lexically_guarded(app: App, site: tuple) -> bool:
    """Intra-procedural check: inside a post-to-UI block or a liveness-check alive branch."""
    _, encl = app.flat(site[0])[site[1]]
    for c, lab in encl:
        if isinstance(c, PostToUi):
            return True
        if isinstance(c, UiSafeCheckIf) and lab == alive_branch(app, c):
            return True
    return False
