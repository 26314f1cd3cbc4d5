"""Executable semantics of a single-GUI-thread app.

One UI thread drains a FIFO queue of work items (handler invocations,
lifecycle steps, posted blocks, async result deliveries).  Async constructs
run as cooperative tasks; a scheduling policy decides, before every UI step,
whether a runnable task advances instead.  Task bodies are generators so a
task can park on a P barrier and resume after the matching V.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from typing import Optional

from ..model import (
    App, Call, EnvIf, FragmentTransaction, PostToUi, ReadInput, Return, StartAsync,
    StartComponent, TryCatch, UiAccess, UiCreate, UiSafeCheckIf, fmt_site,
)
from ..synth import DEFAULT_ENV, Environment, UiEvent

EXCEPTIONS = ("CalledFromWrongThread", "IllegalStateException", "BadTokenException",
              "RuntimeExceptionLooper")

# op codes of the compiled program
CALL, START, ACCESS, CREATE, POST, SAFE, ENVIF, TRY, STARTACT, COMMIT, READ, RETURN = range(12)

# lifecycle machine: (state, callback) -> new state
LEGAL = {
    ("init", "onCreate"): "created",
    ("created", "onStart"): "started",
    ("started", "onResume"): "resumed",
    ("resumed", "onPause"): "paused",
    ("paused", "onResume"): "resumed",
    ("paused", "onStop"): "stopped",
    ("stopped", "onRestart"): "stopped",
    ("stopped", "onStart"): "started",
    ("stopped", "onDestroy"): "destroyed",
}
UPWARD = {"onCreate", "onStart", "onResume", "onRestart"}
ALIVE = {"created", "started", "resumed", "paused"}
CATCH_UP = ("onCreate", "onStart", "onResume", "onPause", "onStop")
CATCH_UP_LEN = {"created": 1, "started": 2, "resumed": 3, "paused": 4, "stopped": 5}
FAULT_OF = {"io-available": "io-failure", "storage-available": "storage-unavailable"}

# work item kinds
H_ITEM, L_ITEM, S_ITEM, P_ITEM, D_ITEM = range(5)
RUNNABLE, BLOCKED, DONE = range(3)


class SimulationError(Exception):
    """Input the simulator cannot execute (unknown widget, event after exit)."""


class LifecycleViolation(AssertionError):
    """Internal: an illegal lifecycle transition was attempted."""


@dataclass(frozen=True)
class CrashReport:
    exception: str
    thread: str
    methodChain: tuple
    eventIndex: int
    environment: Environment
    site: tuple
    statement: str

    def to_json(self) -> dict:
        return {
            "exception": self.exception,
            "thread": self.thread,
            "methodChain": list(self.methodChain),
            "eventIndex": self.eventIndex,
            "environment": self.environment.to_json(),
            "site": fmt_site(self.site),
            "statement": self.statement,
        }


@dataclass
class SimResult:
    status: str  # "ok" or "crash"
    crash: Optional[CrashReport] = None
    methods: tuple = ()
    log: list = field(default_factory=list)
    hb: list = field(default_factory=list)
    dropped: tuple = ()
    ticks: int = 0
    events: int = 0

    @property
    def outcome(self) -> tuple:
        if self.crash is None:
            return ("ok",)
        return ("crash", self.crash.exception, self.crash.site)

    def to_json(self) -> dict:
        return {
            "status": self.status,
            "crash": self.crash.to_json() if self.crash else None,
            "methods": list(self.methods),
            "droppedEvents": list(self.dropped),
        }


class _Crash(Exception):
    def __init__(self, report):
        self.report = report


class Instance:
    __slots__ = ("comp", "kind", "gen", "state", "host", "fragments", "replaces", "gui")

    def __init__(self, comp, kind, gen, host=None, gui=()):
        self.comp = comp
        self.kind = kind
        self.gen = gen
        self.state = "init"
        self.host = host
        self.fragments = []
        self.replaces = None
        self.gui = gui

    @property
    def alive(self) -> bool:
        return self.state in ALIVE

    def __repr__(self):
        return f"{self.comp}#{self.gen}<{self.state}>"


class Task:
    __slots__ = ("aid", "name", "ctx", "gen", "state", "stack", "waiting", "seg", "woken_by",
                 "kind", "post")

    def __init__(self, aid, name, ctx, kind, post):
        self.aid = aid
        self.name = name
        self.ctx = ctx
        self.kind = kind
        self.post = post
        self.gen = None
        self.state = RUNNABLE
        self.stack = []
        self.waiting = None
        self.seg = None
        self.woken_by = None


# --- compilation -------------------------------------------------------------

class Program:
    """App lowered to op tuples; built once per App and shared across runs."""

    def __init__(self, app: App):
        self.app = app
        self.ops = {}
        self.home = {mid: app.home(mid) for mid in app.methods}
        self.comp_kind = {c.id: c.kind for c in app.components}
        self.gui_of = {c.id: tuple(g.id for g in c.gui) for c in app.components}
        self.lifecycle = {}
        for c in app.components:
            for m in c.lifecycle:
                self.lifecycle[(c.id, m.name)] = m.id
        self.asyncs = {}
        for a in app.asyncs:
            pre = a.slot("preExecute")
            bg = a.slot("background")
            post = a.slot("postExecute")
            self.asyncs[a.id] = (a.kind, a.owner, pre.id if pre else None,
                                 bg.id if bg else None, post.id if post else None)
        self.handler_owner = {}
        for c in app.components:
            for h in c.handlers:
                self.handler_owner[h.id] = c.id
        for mid, m in app.methods.items():
            counter = [0]
            self.ops[mid] = self._lower(m.body, counter)
        self.p_sites = {}
        self.v_sites = {}
        for b in app.barriers:
            if b.op == "P":
                self.p_sites[(b.target, b.point)] = b.sem
            else:
                self.v_sites[(b.target, b.point)] = b.sem

    def _lower(self, stmts, counter) -> tuple:
        app = self.app
        out = []
        for s in stmts:
            idx = counter[0]
            counter[0] += 1
            if isinstance(s, Call):
                out.append((CALL, idx, s.target))
            elif isinstance(s, StartAsync):
                out.append((START, idx, s.async_id))
            elif isinstance(s, UiAccess):
                g = app.gui(s.target)
                out.append((ACCESS, idx, s.target, g.kind, g.owner))
            elif isinstance(s, UiCreate):
                out.append((CREATE, idx, s.api))
            elif isinstance(s, PostToUi):
                out.append((POST, idx, self._lower(s.block, counter)))
            elif isinstance(s, UiSafeCheckIf):
                then = self._lower(s.then, counter)
                orelse = self._lower(s.orelse, counter)
                dead_probe = s.check in app.api.dead_probes
                # the check yields True while alive unless it is a dead probe
                then_when_alive = (not dead_probe) != s.negated
                alive_ops, dead_ops = (then, orelse) if then_when_alive else (orelse, then)
                out.append((SAFE, idx, alive_ops, dead_ops))
            elif isinstance(s, EnvIf):
                then = self._lower(s.then, counter)
                orelse = self._lower(s.orelse, counter)
                out.append((ENVIF, idx, s.cond, then, orelse))
            elif isinstance(s, TryCatch):
                body = self._lower(s.body, counter)
                handler = self._lower(s.handler, counter)
                out.append((TRY, idx, FAULT_OF[s.exception], body, handler))
            elif isinstance(s, StartComponent):
                out.append((STARTACT, idx, s.target))
            elif isinstance(s, FragmentTransaction):
                out.append((COMMIT, idx, s.target, app.component(s.target).host))
            elif isinstance(s, ReadInput):
                out.append((READ, idx, s.widget))
            elif isinstance(s, Return):
                out.append((RETURN, idx))
        return tuple(out)


_programs: dict = {}


def program_for(app: App) -> Program:
    key = id(app)
    entry = _programs.get(key)
    if entry is None or entry[0] is not app:
        if len(_programs) > 256:
            _programs.clear()
        entry = (app, Program(app))
        _programs[key] = entry
    return entry[1]


# --- policies ------------------------------------------------------------------

class EagerPolicy:
    """Runnable async work always goes before the next UI step.

    With a focus construct, its tasks go before any other runnable task;
    with defer set, other tasks only run when no UI step is possible.
    """

    def __init__(self, focus=None, defer=False):
        self.focus = focus
        self.defer = defer

    def choose(self, ui_ready: bool, n_tasks: int, tasks=()):
        if self.focus is not None:
            for i, t in enumerate(tasks):
                if t.aid == self.focus:
                    return i
            if self.defer and ui_ready:
                return None
        return 0


class ScriptedPolicy:
    """Replays a prefix of choices, then takes option 0; records every choice."""

    def __init__(self, prefix=()):
        self.prefix = list(prefix)
        self.trail = []

    def choose(self, ui_ready: bool, n_tasks: int, tasks=()):
        n = n_tasks + (1 if ui_ready else 0)
        if n == 1:
            return 0 if not ui_ready else None
        i = len(self.trail)
        c = self.prefix[i] if i < len(self.prefix) else 0
        self.trail.append((c, n))
        if ui_ready:
            return None if c == 0 else c - 1
        return c


class RandomPolicy:
    def __init__(self, rng):
        self.rng = rng

    def choose(self, ui_ready: bool, n_tasks: int, tasks=()):
        n = n_tasks + (1 if ui_ready else 0)
        c = self.rng.randrange(n) if n > 1 else 0
        if ui_ready:
            return None if c == 0 else c - 1
        return c


class _ListSource:
    def __init__(self, events):
        self.events = list(events)
        self.i = 0

    def has_next(self, sim) -> bool:
        return self.i < len(self.events)

    def next(self, sim) -> UiEvent:
        e = self.events[self.i]
        self.i += 1
        return e


# --- simulator -----------------------------------------------------------------

class Simulator:
    def __init__(self, app: App, env: Environment = DEFAULT_ENV, policy=None,
                 record: bool = False, trace: bool = False, extra_barriers=()):
        self.app = app
        self.prog = program_for(app)
        self.env = env
        self.texts = dict(env.inputs)
        self.policy = policy or EagerPolicy()
        self.record = record
        self.trace = trace
        self.p_sites = dict(self.prog.p_sites)
        self.v_sites = dict(self.prog.v_sites)
        for b in extra_barriers:
            if b.op == "P":
                self.p_sites[(b.target, b.point)] = b.sem
            else:
                self.v_sites[(b.target, b.point)] = b.sem
        self.permits = {}
        self.queue = deque()
        self.stack = []  # activity instances, top last
        self.latest = {}
        self.gens = {}
        self.tasks = []
        self.task_counts = {}
        self.running = False
        self.event_index = -1
        self.events_seen = 0
        self.tick = 0
        self.ui_stack = []
        self.executed = {}
        self.exempt = None
        self.rotating = set()  # destroyed instances whose recreation is still queued
        self.thread = "ui"
        self.log = []
        self.hb = []
        self.seg = None
        self.next_seg = 0
        self.ui_segs_since_input = []
        self.dropped = []

    # ---- helpers
    def _new_instance(self, comp, host=None) -> Instance:
        g = self.gens.get(comp, 0) + 1
        self.gens[comp] = g
        return Instance(comp, self.prog.comp_kind[comp], g, host, self.prog.gui_of.get(comp, ()))

    def _chain(self, ctx, comp):
        inst = ctx
        while inst is not None:
            if inst.comp == comp:
                return inst
            inst = inst.host
        raise SimulationError(f"no instance of {comp} in context {ctx!r}")

    def _alloc_seg(self) -> int:
        s = self.next_seg
        self.next_seg += 1
        return s

    def _enqueue(self, kind, a=None, b=None):
        seg = None
        if self.record:
            seg = self._alloc_seg()
            self.hb.append(("post", self.seg, seg))
        self.queue.append((kind, seg, a, b))

    def _crash(self, exc, mid, idx, stmt, task):
        chain = tuple(task.stack if task is not None else self.ui_stack)
        raise _Crash(CrashReport(exc, self.thread, chain, self.event_index, self.env,
                                 (mid, idx), stmt))

    def _access(self, loc, rw, mid, idx):
        self.hb.append(("acc", self.seg, self.thread, mid, idx, loc, rw))

    # ---- statement execution
    def _run(self, mid, ctx, task):
        self.executed[mid] = None
        stack = task.stack if task is not None else self.ui_stack
        stack.append(mid)
        yield from self._block(self.prog.ops[mid], mid, ctx, task)
        if task is not None and (mid, "end") in self.p_sites:
            yield from self._wait(task, self.p_sites[(mid, "end")])
        stack.pop()

    def _block(self, ops, mid, ctx, task):
        p_sites = self.p_sites if task is not None else None
        for op in ops:
            code = op[0]
            if p_sites and (mid, op[1]) in p_sites:
                yield from self._wait(task, p_sites[(mid, op[1])])
            if code == CALL:
                target = op[2]
                if target in (task.stack if task is not None else self.ui_stack):
                    continue  # recursion: the re-entered call takes its base case
                yield from self._run(target, self._chain(ctx, self.prog.home[target]), task)
            elif code == ACCESS:
                inst = self._chain(ctx, op[4])
                if self.record:
                    self._access(f"{op[2]}@{inst.comp}#{inst.gen}", "w", mid, op[1])
                if task is not None:
                    exc = "IllegalStateException" if op[3] == "list-adapter" else "CalledFromWrongThread"
                    self._crash(exc, mid, op[1], "UiAccess", task)
                if inst.state == "destroyed":
                    exc = "BadTokenException" if op[3] in ("dialog", "toast") else "IllegalStateException"
                    self._crash(exc, mid, op[1], "UiAccess", task)
            elif code == CREATE:
                if task is not None:
                    self._crash("RuntimeExceptionLooper", mid, op[1], "UiCreate", task)
            elif code == START:
                yield from self._start_async(op[2], ctx, task)
            elif code == POST:
                self._enqueue(P_ITEM, (op[2], mid), ctx)
            elif code == SAFE:
                branch = op[2] if ctx.state in ALIVE else op[3]
                if (yield from self._block(branch, mid, ctx, task)):
                    return True
            elif code == ENVIF:
                branch = op[3] if self.env.holds(op[2], self.texts) else op[4]
                if (yield from self._block(branch, mid, ctx, task)):
                    return True
            elif code == TRY:
                branch = op[4] if op[2] in self.env.faults else op[3]
                if (yield from self._block(branch, mid, ctx, task)):
                    return True
            elif code == STARTACT:
                self._enqueue(S_ITEM, op[2])
            elif code == COMMIT:
                if task is not None:
                    self._crash("CalledFromWrongThread", mid, op[1], "FragmentTransaction", task)
                host = self._chain(ctx, op[3])
                if self.record:
                    self._access(f"fm@{host.comp}#{host.gen}", "w", mid, op[1])
                if host.state in ("stopped", "destroyed") and host is not self.exempt:
                    self._crash("IllegalStateException", mid, op[1], "FragmentTransaction", task)
                self._attach(op[2], host)
            elif code == RETURN:
                return True
        return False

    def _wait(self, task, sem):
        while self.permits.get(sem, 0) <= 0:
            task.waiting = sem
            yield 1
        task.waiting = None
        self.permits[sem] -= 1

    def _signal(self, sem):
        self.permits[sem] = self.permits.get(sem, 0) + 1
        ref = None
        if self.record:
            ref = len(self.hb)
            self.hb.append(("signal", self.seg, sem))
        for t in self.tasks:
            if t.state == BLOCKED and t.waiting == sem:
                t.state = RUNNABLE
                t.woken_by = ref
                break

    def _start_async(self, aid, ctx, task):
        kind, owner, pre, bg, post = self.prog.asyncs[aid]
        owner_inst = self._chain(ctx, owner)
        n = self.task_counts.get(aid, 0) + 1
        self.task_counts[aid] = n
        t = Task(aid, f"{aid}#{n}", owner_inst, kind, post)
        if pre is not None:
            yield from self._run(pre, owner_inst, task)
        t.gen = self._task_body(t, bg)
        if self.record:
            t.seg = self._alloc_seg()
            self.hb.append(("spawn", self.seg, t.seg))
        self.tasks.append(t)

    def _task_body(self, t, bg):
        if bg is not None:
            yield from self._run(bg, t.ctx, t)
        if t.post is not None and t.kind != "thread":
            self._enqueue(D_ITEM, t)

    def _attach(self, frag, host):
        for f in host.fragments:
            if f.comp == frag and f.state != "destroyed":
                return
        f = self._new_instance(frag, host)
        host.fragments.append(f)
        self.latest[frag] = f
        target = CATCH_UP_LEN.get(host.state, 1)
        for cb in CATCH_UP[:target]:
            self._step(f, cb)

    # ---- lifecycle
    def _step(self, inst, cb):
        new = LEGAL.get((inst.state, cb))
        if new is None:
            raise LifecycleViolation(f"{inst!r} cannot take {cb}")
        if cb in UPWARD:
            inst.state = new
        key = (inst.comp, cb)
        if key in self.v_sites:
            self._signal(self.v_sites[key])
        mid = self.prog.lifecycle.get(key)
        if mid is not None:
            for _ in self._run(mid, inst, None):
                raise AssertionError("UI thread cannot block")
        if cb not in UPWARD:
            inst.state = new
            if new == "destroyed" and self.record:
                for g in inst.gui:
                    self._access(f"{g}@{inst.comp}#{inst.gen}", "w", f"{inst.comp}.onDestroy", None)
            if new == "stopped" and self.record and inst.kind == "activity":
                self._access(f"fm@{inst.comp}#{inst.gen}", "w", f"{inst.comp}.onStop", None)

    def _life(self, inst, cb):
        """Lifecycle step of an activity and its attached fragments."""
        prev_exempt = self.exempt
        self.exempt = inst
        if cb == "onCreate":
            self.latest[inst.comp] = inst
            old = inst.replaces
            if old is not None and old in self.stack:
                self.stack[self.stack.index(old)] = inst
                self.rotating.discard(old)
            elif inst not in self.stack:
                self.stack.append(inst)
        self._step(inst, cb)
        for f in list(inst.fragments):
            if (f.state, cb) in LEGAL:
                self._step(f, cb)
        if inst.state == "destroyed" and inst in self.stack and inst not in self.rotating:
            self.stack.remove(inst)
            if not self.stack:
                self.running = False
        self.exempt = prev_exempt

    def _start_activity(self, comp):
        prev = self.stack[-1] if self.stack else None
        new = self._new_instance(comp)
        if prev is not None and prev.state == "resumed":
            self._life(prev, "onPause")
        self.stack.append(new)
        self.running = True
        for cb in ("onCreate", "onStart", "onResume"):
            self._life(new, cb)
        if prev is not None and prev.state == "paused":
            self._life(prev, "onStop")

    # ---- events
    def _inject(self, ev: UiEvent):
        self.event_index += 1
        self.events_seen += 1
        k = ev.kind
        if self.record:
            seg = self._alloc_seg()
            self.hb.append(("input", seg, self.event_index, tuple(self.ui_segs_since_input)))
            self.ui_segs_since_input = []
            prev_seg = self.seg
            self.seg = seg
        top = self.stack[-1] if self.stack else None
        resumed = top is not None and top.state == "resumed"
        if k == "launch":
            if not self.running:
                inst = self._new_instance(self.app.entry)
                self.stack = [inst]
                self.running = True
                for cb in ("onCreate", "onStart", "onResume"):
                    self._enqueue(L_ITEM, inst, cb)
            elif top.state == "stopped":
                for cb in ("onRestart", "onStart", "onResume"):
                    self._enqueue(L_ITEM, top, cb)
            else:
                self.dropped.append(self.event_index)
        elif not self.running:
            raise SimulationError(f"event {ev} after app exit")
        elif k in ("click", "listItemClick", "input"):
            b = self.app.binding(ev.widget)
            if b is None:
                raise SimulationError(f"unresolvable widget {ev.widget!r}")
            expected = {"click": "click", "listItemClick": "item", "input": "text"}[k]
            if b.kind != expected:
                raise SimulationError(f"widget {ev.widget!r} does not accept {k}")
            ctx = self._visible_owner(b.method) if resumed else None
            if ctx is None:
                self.dropped.append(self.event_index)
            else:
                if k == "input":
                    self.texts[ev.widget] = ev.text or ""
                self._enqueue(H_ITEM, b.method, ctx)
        elif not resumed:
            self.dropped.append(self.event_index)
        elif k == "rotate":
            for cb in ("onPause", "onStop", "onDestroy"):
                self._enqueue(L_ITEM, top, cb)
            fresh = self._new_instance(top.comp)
            fresh.replaces = top
            self.rotating.add(top)
            for cb in ("onCreate", "onStart", "onResume"):
                self._enqueue(L_ITEM, fresh, cb)
        elif k == "home":
            for cb in ("onPause", "onStop"):
                self._enqueue(L_ITEM, top, cb)
        elif k == "longPressHomeThenBack":
            for cb in ("onPause", "onStop", "onRestart", "onStart", "onResume"):
                self._enqueue(L_ITEM, top, cb)
        elif k == "screenToggle":
            for cb in ("onPause", "onResume"):
                self._enqueue(L_ITEM, top, cb)
        elif k == "back":
            self._enqueue(L_ITEM, top, "onPause")
            if len(self.stack) > 1:
                below = self.stack[-2]
                cbs = ("onRestart", "onStart", "onResume") if below.state == "stopped" else ("onResume",)
                for cb in cbs:
                    self._enqueue(L_ITEM, below, cb)
            for cb in ("onStop", "onDestroy"):
                self._enqueue(L_ITEM, top, cb)
        else:
            raise SimulationError(f"unknown event kind {k!r}")
        if self.record:
            self.hb.append(("end", self.seg))
            self.seg = prev_seg

    def _visible_owner(self, mid):
        top = self.stack[-1]
        comp = self.prog.handler_owner.get(mid)
        if top.comp == comp:
            return top
        for f in top.fragments:
            if f.comp == comp and f.state == "resumed":
                return f
        return None

    # ---- dispatch
    def _dispatch(self, item):
        kind, seg, a, b = item
        self.tick += 1
        if self.record:
            self.seg = seg
            self.hb.append(("begin", seg, "ui"))
        if self.trace:
            label = {H_ITEM: lambda: a, L_ITEM: lambda: f"{a.comp}.{b}",
                     S_ITEM: lambda: f"start {a}", P_ITEM: lambda: f"post {a[1]}",
                     D_ITEM: lambda: a.post}[kind]()
            self.log.append(f"[{self.tick}] thread=ui event={self.event_index} method={label}")
        if kind == H_ITEM:
            self._ui_run(a, b)
        elif kind == L_ITEM:
            self._life(a, b)
        elif kind == S_ITEM:
            self._start_activity(a)
        elif kind == P_ITEM:
            ops, mid = a
            cur = self.latest.get(b.comp)
            if cur is not None and cur.alive:
                self.executed[mid] = None
                self.ui_stack.append(mid)
                for _ in self._block(ops, mid, cur, None):
                    raise AssertionError("UI thread cannot block")
                self.ui_stack.pop()
        else:
            t = a
            ctx = t.ctx
            if t.kind == "intent-service":
                ctx = self.latest.get(ctx.comp)
                ctx = ctx if ctx is not None and ctx.alive else None
            elif t.kind == "loader" and not ctx.alive:
                ctx = None
            if ctx is not None:
                self._ui_run(t.post, ctx)
        if self.record:
            self.hb.append(("end", seg))
            self.ui_segs_since_input.append(seg)
            self.seg = None

    def _ui_run(self, mid, ctx):
        for _ in self._run(mid, ctx, None):
            raise AssertionError("UI thread cannot block")

    def _advance(self, t: Task):
        self.tick += 1
        self.thread = t.name
        if self.record:
            if t.woken_by is not None or t.stack:
                prev = t.seg
                t.seg = self._alloc_seg()
                self.hb.append(("resume", t.seg, prev, t.woken_by))
                t.woken_by = None
            self.seg = t.seg
            self.hb.append(("begin", t.seg, t.name))
        if self.trace:
            where = t.stack[-1] if t.stack else self.prog.asyncs[t.aid][3]
            self.log.append(f"[{self.tick}] thread={t.name} event={self.event_index} method={where}")
        try:
            next(t.gen)
            t.state = BLOCKED
        except StopIteration:
            t.state = DONE
        finally:
            self.thread = "ui"
            if self.record:
                self.hb.append(("end", t.seg))
                self.seg = None

    # ---- main loop
    def run(self, source) -> SimResult:
        if not hasattr(source, "has_next"):
            source = _ListSource(source)
        policy = self.policy
        queue = self.queue
        crash = None
        try:
            while True:
                runnable = [t for t in self.tasks if t.state == RUNNABLE]
                ui_ready = bool(queue) or source.has_next(self)
                if not runnable and not ui_ready:
                    break
                choice = policy.choose(ui_ready, len(runnable), runnable) if runnable else None
                if choice is None:
                    if not queue:
                        self._inject(source.next(self))
                        if not queue:
                            continue
                    self._dispatch(queue.popleft())
                else:
                    self._advance(runnable[choice])
                    if runnable[choice].state == DONE:
                        self.tasks.remove(runnable[choice])
        except _Crash as c:
            crash = c.report
        return SimResult(
            status="crash" if crash else "ok",
            crash=crash,
            methods=tuple(self.executed),
            log=self.log,
            hb=self.hb,
            dropped=tuple(self.dropped),
            ticks=self.tick,
            events=self.events_seen,
        )


def run(app: App, seq, env: Environment = DEFAULT_ENV, sched=None, record: bool = False,
        trace: bool = False) -> SimResult:
    """Run one event sequence under a schedule (eager, barrier or random)."""
    from .schedule import Schedule, policy_for
    sched = sched or Schedule("eager")
    events = seq.events if hasattr(seq, "events") else seq
    for e in events:
        if e.widget is not None and app.binding(e.widget) is None:
            raise SimulationError(f"unresolvable widget {e.widget!r}")
    sim = Simulator(app, env, policy_for(sched), record=record, trace=trace,
                    extra_barriers=sched.barriers)
    return sim.run(events)
