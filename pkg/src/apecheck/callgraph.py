"""Static call graph with explicit, implicit (framework) and inter-component edges."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from .model import App, Call, FragmentTransaction, StartAsync, StartComponent, fmt_site

EXPLICIT = "explicit"
IMPLICIT = "implicit"
ICC = "icc"


@dataclass(frozen=True)
class CallEdge:
    caller: str
    callee: str
    kind: str
    site: Optional[tuple] = None  # (caller, stmt index); None for framework-induced edges

    def __str__(self) -> str:
        where = fmt_site(self.site) if self.site is not None else "-"
        return f"{self.caller} -> {self.callee} [{self.kind}] @{where}"


@dataclass
class CallGraph:
    nodes: tuple
    edges: tuple
    app: Optional[App] = field(default=None, repr=False, compare=False)
    _callers: dict = field(default_factory=dict, repr=False, compare=False)
    _callees: dict = field(default_factory=dict, repr=False, compare=False)

    def __post_init__(self):
        for n in self.nodes:
            self._callers[n] = []
            self._callees[n] = []
        for e in self.edges:
            self._callers[e.callee].append(e)
            self._callees[e.caller].append(e)

    def callees(self, m: str) -> list:
        return list(self._callees[m])

    def reachable_from(self, root: str) -> set:
        if root not in self._callees:
            return set()
        seen = {root}
        todo = deque([root])
        while todo:
            m = todo.popleft()
            for e in self._callees[m]:
                if e.callee not in seen:
                    seen.add(e.callee)
                    todo.append(e.callee)
        return seen

    def to_text(self) -> str:
        return "\n".join(str(e) for e in self.edges) + ("\n" if self.edges else "")


def build_call_graph(app: App) -> CallGraph:
    """Edges in a fixed order: per method in declaration order, statement edges
    by index, then framework edges of the method."""
    edges: list = []
    seen: set = set()

    def add(caller, callee, kind, site):
        key = (caller, callee, site)
        if callee is None or key in seen:
            return
        seen.add(key)
        edges.append(CallEdge(caller, callee, kind, site))

    def on_create(cid):
        c = app.component(cid)
        if c is None:
            return None
        m = c.lifecycle_callbacks.get("onCreate")
        return m.id if m is not None else None

    for mid in app.methods:
        for i, (s, _) in enumerate(app.flat(mid)):
            if isinstance(s, Call):
                add(mid, s.target, EXPLICIT, (mid, i))
            elif isinstance(s, StartAsync):
                a = app.async_(s.async_id)
                first = a.first_callback() if a is not None else None
                add(mid, first.id if first else None, EXPLICIT, (mid, i))
            elif isinstance(s, StartComponent):
                add(mid, on_create(s.target), ICC, (mid, i))
            elif isinstance(s, FragmentTransaction):
                add(mid, on_create(s.target), IMPLICIT, (mid, i))

        m = app.method(mid)
        comp = app.component(m.owner)
        if comp is not None and m.name == "onCreate" and m.role == "lifecycle-callback":
            # the framework drives the rest of the lifecycle and dispatches the
            # component's handlers once the instance exists
            for other in comp.lifecycle:
                if other.id != mid:
                    add(mid, other.id, IMPLICIT, None)
            for h in comp.handlers:
                add(mid, h.id, IMPLICIT, None)
        a = app.async_(m.owner)
        if a is not None and m.role == "async-callback" and a.kind != "thread":
            nxt = {"preExecute": "background", "background": "postExecute"}.get(m.name)
            target = a.slot(nxt) if nxt else None
            if target is not None:
                add(mid, target.id, IMPLICIT, None)

    return CallGraph(tuple(app.methods), tuple(edges), app)


def callers_of(cg: CallGraph, m: str) -> list:
    """Edges whose callee is `m`, ordered by caller declaration then statement index."""
    if m not in cg._callers:
        raise KeyError(f"unknown method {m!r}")
    edges = list(cg._callers[m])
    order = {n: i for i, n in enumerate(cg.nodes)}
    edges.sort(key=lambda e: (order[e.caller], -1 if e.site is None else e.site[1]))
    return edges
