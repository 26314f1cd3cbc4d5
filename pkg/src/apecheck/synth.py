"""Turn a terminated trace into a replayable event sequence and environment."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

from .model import App, EnvCondition, EnvIf, FragmentTransaction, flatten

EVENT_KINDS = ("launch", "click", "listItemClick", "input", "rotate", "home",
               "longPressHomeThenBack", "screenToggle", "back")

# lifecycle callbacks a user can force from outside the app
LIFECYCLE_EVENTS = {
    "onDestroy": "rotate",
    "onRestart": "longPressHomeThenBack",
    "onStop": "home",
    "onPause": "screenToggle",
}

FORMAT_SAMPLES = {"email": "a@b.co", "phone": "5551234", "number": "1"}


class UnmappableTrace(Exception):
    """A handler on the trace has no widget binding."""


class UnsatisfiableEnvironment(Exception):
    """The recorded conditions contradict each other."""


@dataclass(frozen=True)
class UiEvent:
    kind: str
    widget: Optional[str] = None
    index: Optional[int] = None
    text: Optional[str] = None

    def __str__(self) -> str:
        if self.kind == "click":
            return f"click({self.widget})"
        if self.kind == "listItemClick":
            return f"listItemClick({self.widget}, {self.index})"
        if self.kind == "input":
            return f"input({self.widget}, {self.text!r})"
        return self.kind

    def to_json(self) -> dict:
        d = {"kind": self.kind}
        if self.widget is not None:
            d["widget"] = self.widget
        if self.index is not None:
            d["index"] = self.index
        if self.text is not None:
            d["text"] = self.text
        return d

    @classmethod
    def from_json(cls, d: dict) -> "UiEvent":
        if d.get("kind") not in EVENT_KINDS:
            raise ValueError(f"unknown event kind {d.get('kind')!r}")
        return cls(d["kind"], d.get("widget"), d.get("index"), d.get("text"))


LAUNCH = UiEvent("launch")
ROTATE = UiEvent("rotate")
HOME = UiEvent("home")
BACK = UiEvent("back")


@dataclass(frozen=True)
class EventSequence:
    events: tuple
    traceRef: object = field(default=None, compare=False, repr=False)

    def __len__(self) -> int:
        return len(self.events)

    def to_json(self) -> list:
        return [e.to_json() for e in self.events]


@dataclass(frozen=True)
class Environment:
    inputs: tuple = ()  # sorted (widget, text) pairs
    wifi: bool = True
    permissions: tuple = ()  # granted permission names, sorted
    faults: tuple = ()  # subset of {io-failure, storage-unavailable}, sorted

    @property
    def input_map(self) -> dict:
        return dict(self.inputs)

    def holds(self, cond: EnvCondition, texts: Optional[dict] = None) -> bool:
        k = cond.kind
        if k == "wifi-enabled":
            v = self.wifi
        elif k == "permission-granted":
            v = cond.arg in self.permissions
        elif k == "io-available":
            v = "io-failure" not in self.faults
        elif k == "storage-available":
            v = "storage-unavailable" not in self.faults
        else:
            text = (texts if texts is not None else self.input_map).get(cond.arg, "")
            v = cond.constraint.matches(text)
        return v != cond.negated

    def to_json(self) -> dict:
        return {
            "inputs": dict(self.inputs),
            "settings": {"wifi": "on" if self.wifi else "off",
                         "permissions": list(self.permissions)},
            "injectedFaults": list(self.faults),
        }

    @classmethod
    def from_json(cls, d: dict) -> "Environment":
        s = d.get("settings", {})
        return cls(tuple(sorted(d.get("inputs", {}).items())), s.get("wifi", "on") == "on",
                   tuple(sorted(s.get("permissions", []))), tuple(sorted(d.get("injectedFaults", []))))


DEFAULT_ENV = Environment()


def handler_event(app: App, mid: str, texts: Optional[dict] = None) -> UiEvent:
    bs = app.bindings_for(mid)
    if not bs:
        raise UnmappableTrace(f"handler {mid} has no widget binding")
    b = bs[0]
    if b.kind == "item":
        return UiEvent("listItemClick", b.widget, 0)
    if b.kind == "text":
        return UiEvent("input", b.widget, text=(texts or {}).get(b.widget, "x"))
    return UiEvent("click", b.widget)


def tweak_event(app: App, cand) -> Optional[UiEvent]:
    """Lifecycle tweak that stales the async's owner before it returns (P3 only)."""
    if cand is None or cand.pattern != "P3":
        return None
    if isinstance(app.stmt_at(cand.stmtAccessUI), FragmentTransaction):
        return HOME  # state loss happens once the host is stopped
    return ROTATE


def synthesize_events(t, app: App, cand=None, env: Optional[Environment] = None) -> EventSequence:
    if t.state != "terminated":
        raise ValueError("only terminated traces can be turned into events")
    texts = env.input_map if env is not None else None
    events = [LAUNCH]
    for mid in reversed(t.chain):
        m = app.method(mid)
        if m.role == "event-handler":
            events.append(handler_event(app, mid, texts))
        elif m.role == "lifecycle-callback" and m.name in LIFECYCLE_EVENTS:
            events.append(UiEvent(LIFECYCLE_EVENTS[m.name]))
    tweak = tweak_event(app, cand)
    if tweak is not None:
        events.append(tweak)
    return EventSequence(tuple(events), t)


def _value_pool(app: App, widget: str) -> list:
    pool = ["", "x", "0", "zz"] + list(FORMAT_SAMPLES.values())
    for mid in app.methods:
        for s, _ in flatten(app.method(mid).body):
            if isinstance(s, EnvIf) and s.cond.kind == "input-matches" and s.cond.arg == widget:
                c = s.cond.constraint
                if c.op != "format":
                    pool.append(c.value)
    return list(dict.fromkeys(pool))


# further values per format, tried when the first sample is excluded
FORMAT_ALTERNATES = {
    "email": ("x@y.io", "m@n.org", "u@v.net"),
    "phone": ("7778899", "+4412345"),
    "number": ("7", "42", "-3"),
}


def _solve_input(app: App, widget: str, conds: list) -> str:
    """A value meeting every constraint; required characters are spliced into samples."""
    positive = [c.constraint for c in conds if not c.negated]
    bases = []
    for c in positive:
        if c.op == "format":
            bases += [FORMAT_SAMPLES[c.value], *FORMAT_ALTERNATES[c.value]]
        else:
            bases.append(c.value)
    bases += _value_pool(app, widget)
    need = "".join(sorted({c.value for c in positive if c.op == "contains"}))
    candidates = []
    for b in bases:
        candidates += [b, need + b, b + need] if need else [b]
    for v in candidates:
        if all(c.constraint.matches(v) != c.negated for c in conds):
            return v
    raise UnsatisfiableEnvironment(f"no value for {widget} satisfies {[str(c) for c in conds]}")


def infer_environment(t, app: App) -> Environment:
    if t.state != "terminated":
        raise ValueError("only terminated traces can be turned into environments")
    perms: dict = {}
    faults: dict = {}
    inputs: dict = {}

    def setting(store, key, value):
        if store.get(key, value) != value:
            raise UnsatisfiableEnvironment(f"{key} required both on and off")
        store[key] = value

    box = {}
    for c in t.conditions:
        if c.kind == "wifi-enabled":
            setting(box, "wifi", not c.negated)
        elif c.kind == "permission-granted":
            setting(perms, c.arg, not c.negated)
        elif c.kind == "io-available":
            setting(faults, "io-failure", c.negated)
        elif c.kind == "storage-available":
            setting(faults, "storage-unavailable", c.negated)
        else:
            inputs.setdefault(c.arg, []).append(c)
    wifi = box.get("wifi", True)
    values = {w: _solve_input(app, w, cs) for w, cs in inputs.items()}
    return Environment(
        inputs=tuple(sorted(values.items())),
        wifi=wifi,
        permissions=tuple(sorted(p for p, on in perms.items() if on)),
        faults=tuple(sorted(f for f, on in faults.items() if on)),
    )
