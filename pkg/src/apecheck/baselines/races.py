"""Happens-before race detection over recorded simulator logs.

The graph has one node per atomic execution segment: a dispatched UI work
item, an injected input, or one uninterrupted step of an async task.  Edges:

* post: the segment that enqueued a work item precedes the item;
* FIFO: items enqueued by the same segment run in enqueue order;
* spawn: the starting segment precedes the task's first step;
* resume: a task step precedes its next step, and a barrier signal precedes
  the step it wakes;
* idle: every UI item dispatched since the previous input, and that input
  itself, precede the next input (inputs arrive on an idle looper).

UI work items are otherwise unordered, as in event-race detectors for
looper-based apps.  Two accesses to one location, at least one a write, in
segments unordered by the transitive closure, form a race.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

from ..sim import explore_all_schedules, run
from .hbkernel import reach_batch


class MalformedLog(ValueError):
    """The log is not a recorded simulator log."""


@dataclass(frozen=True)
class Access:
    thread: str
    method: str
    statement: Optional[int]  # None for framework writes (destroy, stop)
    location: str
    rw: str

    @property
    def site(self) -> Optional[tuple]:
        return None if self.statement is None else (self.method, self.statement)

    def to_json(self) -> dict:
        return {"thread": self.thread, "method": self.method, "statement": self.statement,
                "location": self.location, "rw": self.rw}


@dataclass(frozen=True)
class RaceReport:
    site: tuple  # app-code statement this report stands for
    accessA: Access
    accessB: Access
    hbRelated: bool = False

    def to_json(self) -> dict:
        return {"site": f"{self.site[0]}:{self.site[1]}", "accessA": self.accessA.to_json(),
                "accessB": self.accessB.to_json(), "hbRelated": self.hbRelated}


@dataclass
class HBGraph:
    indptr: list
    indices: list
    accesses: list  # (node, Access) in execution order

    @property
    def n_nodes(self) -> int:
        return len(self.indptr) - 1


def _check(rec, n):
    if len(rec) != n:
        raise MalformedLog(f"bad record {rec!r}")


def build_hb_graph(log) -> HBGraph:
    node: dict = {}  # segment -> node id in execution order
    edges = []
    accesses = []
    last_child: dict = {}  # poster segment -> last item it enqueued
    signal_seg: dict = {}
    prev_input = None
    for i, rec in enumerate(log):
        if not isinstance(rec, tuple) or not rec:
            raise MalformedLog(f"bad record {rec!r}")
        kind = rec[0]
        if kind == "post":
            _check(rec, 3)
            _, poster, seg = rec
            if poster is not None:
                edges.append((poster, seg))
                if poster in last_child:
                    edges.append((last_child[poster], seg))
                last_child[poster] = seg
        elif kind == "spawn":
            _check(rec, 3)
            if rec[1] is not None:
                edges.append((rec[1], rec[2]))
        elif kind == "signal":
            _check(rec, 3)
            signal_seg[i] = rec[1]
        elif kind == "resume":
            _check(rec, 4)
            _, seg, prev, ref = rec
            edges.append((prev, seg))
            if ref is not None:
                if ref not in signal_seg:
                    raise MalformedLog(f"resume refers to unknown signal {ref}")
                edges.append((signal_seg[ref], seg))
        elif kind == "input":
            _check(rec, 4)
            _, seg, _, prior = rec
            node.setdefault(seg, len(node))
            for p in prior:
                edges.append((p, seg))
            if prev_input is not None:
                edges.append((prev_input, seg))
            prev_input = seg
        elif kind == "begin":
            _check(rec, 3)
            node.setdefault(rec[1], len(node))
        elif kind == "end":
            _check(rec, 2)
        elif kind == "acc":
            _check(rec, 7)
            _, seg, thread, mid, idx, loc, rw = rec
            if seg not in node:
                raise MalformedLog(f"access outside a segment: {rec!r}")
            accesses.append((node[seg], Access(thread, mid, idx, loc, rw)))
        else:
            raise MalformedLog(f"unknown record kind {kind!r}")
    n = len(node)
    adj = [[] for _ in range(n)]
    for a, b in edges:
        if a in node and b in node:  # items never dispatched carry no order
            u, v = node[a], node[b]
            if u >= v:
                raise MalformedLog("edge against execution order")
            adj[u].append(v)
    indptr = [0]
    indices = []
    for row in adj:
        indices.extend(sorted(set(row)))
        indptr.append(len(indices))
    return HBGraph(indptr, indices, accesses)


def conflicting_pairs(g: HBGraph) -> list:
    """Index pairs (i, j), i < j, of accesses that conflict and sit in distinct segments."""
    by_loc: dict = {}
    for k, (_, acc) in enumerate(g.accesses):
        by_loc.setdefault(acc.location, []).append(k)
    pairs = []
    for ks in by_loc.values():
        for x in range(len(ks)):
            i = ks[x]
            ni, ai = g.accesses[i]
            for y in range(x + 1, len(ks)):
                j = ks[y]
                nj, aj = g.accesses[j]
                if ni == nj or (ai.rw != "w" and aj.rw != "w"):
                    continue
                if ai.site is None and aj.site is None:
                    continue
                pairs.append((i, j))
    return pairs


def detect_races(log, impl=None) -> list:
    """Unordered conflicting accesses, one report per app-code site."""
    g = build_hb_graph(log)
    pairs = conflicting_pairs(g)
    order = sorted(range(len(pairs)), key=lambda p: (g.accesses[pairs[p][0]][0], p))
    src = [g.accesses[pairs[p][0]][0] for p in order]
    dst = [g.accesses[pairs[p][1]][0] for p in order]
    ordered = [0] * len(pairs)
    for p, r in zip(order, reach_batch(g.indptr, g.indices, src, dst, impl)):
        ordered[p] = r
    reports = []
    seen = set()
    for (i, j), hb in zip(pairs, ordered):
        if hb:
            continue
        a, b = g.accesses[i][1], g.accesses[j][1]
        for site in sorted({s for s in (a.site, b.site) if s is not None}):
            if site not in seen:
                seen.add(site)
                reports.append(RaceReport(site, a, b))
    return reports


def race_sites(reports) -> set:
    return {r.site for r in reports}


def collect_logs(app, tests, mode: str = "exhaustive", bound: int = 10_000) -> list:
    """Recorded logs for (events, environment) pairs under eager or exhaustive scheduling."""
    logs = []
    for events, env in tests:
        if mode == "eager":
            logs.append(run(app, events, env, record=True).hb)
        elif mode == "exhaustive":
            ex = explore_all_schedules(app, events, env, bound=bound, record=True, keep_all=True)
            logs.extend(r.hb for r in ex.results)
        else:
            raise ValueError(f"unknown log mode {mode!r}")
    return logs


def detect_races_in(logs, impl=None) -> list:
    """Races over several logs, one report per site across all of them."""
    reports = []
    seen = set()
    for log in logs:
        for r in detect_races(log, impl):
            if r.site not in seen:
                seen.add(r.site)
                reports.append(r)
    return reports
