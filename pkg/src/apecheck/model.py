"""Immutable data model for apps written in the `.ape` description language."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union

LIFECYCLE_NAMES = ("onCreate", "onStart", "onResume", "onPause", "onStop", "onDestroy", "onRestart")
ASYNC_SLOTS = ("preExecute", "background", "postExecute")
COMPONENT_KINDS = ("activity", "fragment", "service", "receiver")
GUI_KINDS = ("dialog", "toast", "list-adapter", "view")
ASYNC_KINDS = ("task", "thread", "loader", "intent-service")
BINDING_KINDS = ("click", "item", "text")
BINDING_SOURCES = ("code", "layout")
ENV_KINDS = ("wifi-enabled", "permission-granted", "input-matches", "io-available", "storage-available")
CATCH_KINDS = ("io-available", "storage-available")
INPUT_FORMATS = ("email", "phone", "number")

_FORMATS = {
    "email": re.compile(r"[^@\s]+@[^@\s]+\.[^@\s]+"),
    "phone": re.compile(r"\+?[0-9]{5,15}"),
    "number": re.compile(r"-?[0-9]+"),
}

ROLE_LIFECYCLE = "lifecycle-callback"
ROLE_HANDLER = "event-handler"
ROLE_ASYNC = "async-callback"
ROLE_PLAIN = "plain"


@dataclass(frozen=True)
class InputConstraint:
    op: str  # format | equals | contains
    value: str

    def matches(self, text: str) -> bool:
        if self.op == "format":
            return bool(_FORMATS[self.value].fullmatch(text))
        if self.op == "equals":
            return text == self.value
        return self.value in text


@dataclass(frozen=True)
class EnvCondition:
    kind: str
    negated: bool = False
    arg: Optional[str] = None  # permission name or widget id
    constraint: Optional[InputConstraint] = None

    def negate(self) -> "EnvCondition":
        return EnvCondition(self.kind, not self.negated, self.arg, self.constraint)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "negated": self.negated}
        if self.arg is not None:
            d["arg"] = self.arg
        if self.constraint is not None:
            d["constraint"] = {"op": self.constraint.op, "value": self.constraint.value}
        return d

    @classmethod
    def from_json(cls, d: dict) -> "EnvCondition":
        c = d.get("constraint")
        return cls(d["kind"], bool(d.get("negated", False)), d.get("arg"),
                   InputConstraint(c["op"], c["value"]) if c else None)

    def __str__(self) -> str:
        s = self.kind
        if self.arg is not None:
            s += f"({self.arg}"
            if self.constraint is not None:
                s += f", {self.constraint.op} {self.constraint.value}"
            s += ")"
        return ("not " if self.negated else "") + s


# --- statements -----------------------------------------------------------

@dataclass(frozen=True)
class Call:
    target: str


@dataclass(frozen=True)
class StartAsync:
    async_id: str


@dataclass(frozen=True)
class UiAccess:
    api: str
    target: str


@dataclass(frozen=True)
class UiCreate:
    api: str


@dataclass(frozen=True)
class PostToUi:
    block: tuple = ()
    api: str = "post"


@dataclass(frozen=True)
class UiSafeCheckIf:
    check: str
    then: tuple = ()
    orelse: tuple = ()
    negated: bool = False


@dataclass(frozen=True)
class EnvIf:
    cond: EnvCondition
    then: tuple = ()
    orelse: tuple = ()


@dataclass(frozen=True)
class TryCatch:
    body: tuple = ()
    exception: str = "io-available"
    handler: tuple = ()


@dataclass(frozen=True)
class StartComponent:
    target: str


@dataclass(frozen=True)
class FragmentTransaction:
    target: str


@dataclass(frozen=True)
class ReadInput:
    widget: str


@dataclass(frozen=True)
class Return:
    pass


Stmt = Union[Call, StartAsync, UiAccess, UiCreate, PostToUi, UiSafeCheckIf, EnvIf,
             TryCatch, StartComponent, FragmentTransaction, ReadInput, Return]

UI_TOUCHING = (UiAccess, UiCreate, FragmentTransaction)


def branches(stmt) -> tuple:
    """Nested statement lists of a compound statement as (label, stmts) pairs."""
    if isinstance(stmt, PostToUi):
        return (("block", stmt.block),)
    if isinstance(stmt, (UiSafeCheckIf, EnvIf)):
        return (("then", stmt.then), ("else", stmt.orelse))
    if isinstance(stmt, TryCatch):
        return (("body", stmt.body), ("handler", stmt.handler))
    return ()


def flatten(body) -> list:
    """Pre-order list of (stmt, enclosing) where enclosing is ((compound, label), ...).

    The position in the returned list is the statement index used for sites.
    """
    out: list = []

    def walk(stmts, encl):
        for s in stmts:
            out.append((s, encl))
            for label, sub in branches(s):
                walk(sub, encl + ((s, label),))

    walk(body, ())
    return out


# --- declarations ---------------------------------------------------------

@dataclass(frozen=True)
class MethodDecl:
    id: str
    owner: str
    role: str
    body: tuple = ()

    @property
    def name(self) -> str:
        return self.id.rsplit(".", 1)[-1]


@dataclass(frozen=True)
class GuiObjectDecl:
    id: str
    kind: str
    owner: str


@dataclass(frozen=True)
class ComponentDecl:
    id: str
    kind: str
    lifecycle: tuple = ()  # MethodDecl, declaration order
    handlers: tuple = ()
    methods: tuple = ()  # plain helpers
    gui: tuple = ()
    host: Optional[str] = None

    @property
    def lifecycle_callbacks(self) -> dict:
        return {m.name: m for m in self.lifecycle}

    def all_methods(self) -> tuple:
        return self.lifecycle + self.handlers + self.methods


@dataclass(frozen=True)
class AsyncConstructDecl:
    id: str
    kind: str
    owner: str
    callbacks: tuple = ()  # MethodDecl in declaration order
    methods: tuple = ()
    lifecycle_aware: bool = False

    @property
    def slots(self) -> dict:
        return {m.name: m for m in self.callbacks}

    def slot(self, name: str) -> Optional[MethodDecl]:
        for m in self.callbacks:
            if m.name == name:
                return m
        return None

    def first_callback(self) -> Optional[MethodDecl]:
        return self.slot("preExecute") or self.slot("background")

    def all_methods(self) -> tuple:
        return self.callbacks + self.methods


@dataclass(frozen=True)
class Binding:
    widget: str
    method: str
    kind: str = "click"
    source: str = "code"


@dataclass(frozen=True)
class ApiConfig:
    ui_access: tuple = ()
    ui_safe: tuple = ()
    ui_create: tuple = ()
    post_looper: tuple = ()
    dead_probes: tuple = ()  # ui-safe checks that return true when the owner is gone

    def overlaps(self) -> list:
        lists = {"ui-access": self.ui_access, "ui-safe": self.ui_safe,
                 "ui-create": self.ui_create, "post-looper": self.post_looper}
        names = list(lists)
        found = []
        for i, a in enumerate(names):
            for b in names[i + 1:]:
                for api in sorted(set(lists[a]) & set(lists[b])):
                    found.append((api, a, b))
        return found


@dataclass(frozen=True)
class Barrier:
    """Semaphore operation added by instrumentation.

    P waits in method `target` before statement `point` (or at "end");
    V signals at the start of lifecycle callback `point` of component `target`.
    """
    op: str
    target: str
    point: object
    sem: str = "s0"


@dataclass(frozen=True)
class App:
    name: str
    entry: str
    components: tuple = ()
    asyncs: tuple = ()
    bindings: tuple = ()
    api: ApiConfig = field(default_factory=ApiConfig)
    barriers: tuple = ()
    _index: dict = field(default=None, init=False, repr=False, compare=False, hash=False)

    def __post_init__(self):
        methods: dict = {}
        home: dict = {}
        for c in self.components:
            for m in c.all_methods():
                methods.setdefault(m.id, m)
                home.setdefault(m.id, c.id)
        for a in self.asyncs:
            for m in a.all_methods():
                methods.setdefault(m.id, m)
                home.setdefault(m.id, a.owner)
        idx = {
            "methods": methods,
            "order": {mid: i for i, mid in enumerate(methods)},
            "home": home,
            "components": {c.id: c for c in self.components},
            "asyncs": {a.id: a for a in self.asyncs},
            "gui": {g.id: g for c in self.components for g in c.gui},
            "bindings": {b.widget: b for b in self.bindings},
            "flat": {},
        }
        object.__setattr__(self, "_index", idx)

    # lookups
    @property
    def methods(self) -> dict:
        return self._index["methods"]

    def method(self, mid: str) -> MethodDecl:
        return self._index["methods"][mid]

    def decl_order(self, mid: str) -> int:
        return self._index["order"].get(mid, len(self._index["order"]))

    def component(self, cid: str) -> Optional[ComponentDecl]:
        return self._index["components"].get(cid)

    def async_(self, aid: str) -> Optional[AsyncConstructDecl]:
        return self._index["asyncs"].get(aid)

    def gui(self, gid: str) -> Optional[GuiObjectDecl]:
        return self._index["gui"].get(gid)

    def binding(self, widget: str) -> Optional[Binding]:
        return self._index["bindings"].get(widget)

    @property
    def handler_bindings(self) -> dict:
        return {b.widget: b.method for b in self.bindings}

    def bindings_for(self, mid: str) -> list:
        return [b for b in self.bindings if b.method == mid]

    def home(self, mid: str) -> Optional[str]:
        """Component whose instance is the context for the method."""
        return self._index["home"].get(mid)

    def host_chain(self, cid: Optional[str]) -> list:
        out = []
        seen = set()
        while cid is not None and cid not in seen:
            seen.add(cid)
            out.append(cid)
            c = self.component(cid)
            cid = c.host if c is not None and c.kind == "fragment" else None
        return out

    def flat(self, mid: str) -> list:
        cache = self._index["flat"]
        if mid not in cache:
            cache[mid] = flatten(self.method(mid).body)
        return cache[mid]

    def stmt_at(self, site: tuple):
        mid, i = site
        return self.flat(mid)[i][0]

    def async_of(self, mid: str) -> Optional[AsyncConstructDecl]:
        m = self.methods.get(mid)
        return self.async_(m.owner) if m is not None else None

    def entry_callbacks(self) -> set:
        c = self.component(self.entry)
        if c is None:
            return set()
        return {m.id for m in c.lifecycle + c.handlers}


def fmt_site(site) -> str:
    return f"{site[0]}:{site[1]}"


def parse_site(text: str) -> tuple:
    mid, _, idx = text.rpartition(":")
    return (mid, int(idx))


def walk_stmts(body) -> Iterator:
    for s, _ in flatten(body):
        yield s
