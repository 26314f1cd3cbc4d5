"""Structural well-formedness checks for a parsed App."""
from __future__ import annotations

from .dsl import Diagnostic
from .model import (
    ASYNC_KINDS, CATCH_KINDS, COMPONENT_KINDS, GUI_KINDS, LIFECYCLE_NAMES, ROLE_HANDLER,
    App, Call, EnvIf, FragmentTransaction, PostToUi, StartAsync, StartComponent, TryCatch,
    UiAccess, UiCreate, UiSafeCheckIf, flatten,
)

_ALLOWED_SLOTS = {
    "thread": {"background"},
    "task": {"preExecute", "background", "postExecute"},
    "loader": {"preExecute", "background", "postExecute"},
    "intent-service": {"background", "postExecute"},
}


def validate_app(app: App) -> list:
    """Return one Diagnostic per violated invariant; empty means well-formed."""
    out: list = []

    def bad(code, where, msg):
        out.append(Diagnostic(code, f"{where}: {msg}"))

    api = app.api
    for name, a, b in api.overlaps():
        bad("api-disjoint", "api config", f"{name!r} appears in both {a} and {b}")

    entry = app.component(app.entry)
    if entry is None or entry.kind != "activity":
        bad("entry", "app", f"entry {app.entry!r} is not a declared activity")

    ids: set = set()
    for d in list(app.components) + list(app.asyncs):
        if d.id in ids:
            bad("duplicate", d.id, "identifier declared twice")
        ids.add(d.id)

    for c in app.components:
        if c.kind not in COMPONENT_KINDS:
            bad("component-kind", c.id, f"unknown kind {c.kind!r}")
        if c.kind == "fragment":
            host = app.component(c.host) if c.host else None
            if host is None or host.kind != "activity":
                bad("fragment-host", c.id, "fragment needs a host activity that resolves")
        elif c.host is not None:
            bad("fragment-host", c.id, "only fragments declare a host")
        names = [m.name for m in c.lifecycle]
        for n in names:
            if n not in LIFECYCLE_NAMES:
                bad("lifecycle-name", c.id, f"illegal lifecycle callback {n!r}")
        if len(set(names)) != len(names):
            bad("duplicate", c.id, "lifecycle callback declared twice")
        if c.kind in ("activity", "fragment") and (c.handlers or c.lifecycle) and "onCreate" not in names:
            bad("on-create", c.id, "declares callbacks but no onCreate")
        if c.kind in ("service", "receiver") and c.handlers:
            bad("handler-owner", c.id, "only activities and fragments own event handlers")
        for g in c.gui:
            if g.kind not in GUI_KINDS:
                bad("gui-kind", g.id, f"unknown kind {g.kind!r}")
            if g.owner != c.id:
                bad("gui-owner", g.id, f"owner {g.owner!r} does not match declaring component")

    for a in app.asyncs:
        if a.kind not in ASYNC_KINDS:
            bad("async-kind", a.id, f"unknown kind {a.kind!r}")
            continue
        slots = [m.name for m in a.callbacks]
        if len(set(slots)) != len(slots):
            bad("duplicate", a.id, "callback slot declared twice")
        for s in slots:
            if s not in _ALLOWED_SLOTS[a.kind]:
                bad("async-slots", a.id, f"{a.kind} construct cannot define {s}")
        if "background" not in slots:
            bad("async-slots", a.id, "background slot is required")
        if a.lifecycle_aware != (a.kind == "loader"):
            bad("lifecycle-aware", a.id, "lifecycle-aware must hold exactly for loaders")
        owner = app.component(a.owner)
        if owner is None or owner.kind not in ("activity", "fragment"):
            bad("async-owner", a.id, f"owner {a.owner!r} is not an activity or fragment")

    widgets: set = set()
    for b in app.bindings:
        if b.widget in widgets:
            bad("duplicate", b.widget, "widget bound twice")
        widgets.add(b.widget)
        m = app.methods.get(b.method)
        if m is None:
            bad("unresolved", b.widget, f"binding target {b.method!r} does not resolve")
        elif m.role != ROLE_HANDLER:
            bad("binding-target", b.widget, f"{b.method} is not an event handler")

    for mid, m in app.methods.items():
        chain = app.host_chain(app.home(mid))
        own_async = app.async_(m.owner)
        for i, (s, _) in enumerate(flatten(m.body)):
            where = f"{mid}:{i}"
            if isinstance(s, Call):
                t = app.methods.get(s.target)
                if t is None:
                    bad("unresolved", where, f"call target {s.target!r}")
                    continue
                if app.async_(t.owner) is not None and t.role != "plain":
                    bad("call-target", where, "async callbacks are invoked by the framework only")
                if app.home(s.target) not in chain:
                    bad("call-scope", where, f"{s.target} belongs to a component outside {chain}")
            elif isinstance(s, StartAsync):
                a = app.async_(s.async_id)
                if a is None:
                    bad("unresolved", where, f"async construct {s.async_id!r}")
                    continue
                if own_async is not None and own_async.id == a.id:
                    bad("self-respawn", where, f"{a.id} starts itself")
                if a.owner not in chain:
                    bad("async-scope", where, f"{a.id} is owned by {a.owner}, outside {chain}")
            elif isinstance(s, UiAccess):
                if s.api not in api.ui_access:
                    bad("api", where, f"{s.api!r} is not a ui-access API")
                g = app.gui(s.target)
                if g is None:
                    bad("unresolved", where, f"gui object {s.target!r}")
                elif g.owner not in chain:
                    bad("gui-scope", where, f"{s.target} belongs to {g.owner}, outside {chain}")
            elif isinstance(s, UiCreate):
                if s.api not in api.ui_create:
                    bad("api", where, f"{s.api!r} is not a ui-create API")
            elif isinstance(s, PostToUi):
                if s.api not in api.post_looper:
                    bad("api", where, f"{s.api!r} is not a post-looper API")
            elif isinstance(s, UiSafeCheckIf):
                if s.check not in api.ui_safe:
                    bad("api", where, f"{s.check!r} is not a ui-safe API")
            elif isinstance(s, StartComponent):
                c = app.component(s.target)
                if c is None or c.kind != "activity":
                    bad("unresolved", where, f"activity {s.target!r}")
            elif isinstance(s, FragmentTransaction):
                f = app.component(s.target)
                if f is None or f.kind != "fragment":
                    bad("unresolved", where, f"fragment {s.target!r}")
                elif f.host not in chain:
                    bad("commit-scope", where, f"{s.target} is hosted by {f.host}, outside {chain}")
            elif isinstance(s, TryCatch):
                if s.exception not in CATCH_KINDS:
                    bad("catch-kind", where, f"cannot catch {s.exception!r}")
            elif isinstance(s, EnvIf):
                c = s.cond
                if c.kind == "input-matches" and (c.arg is None or c.constraint is None):
                    bad("env-cond", where, "input-matches needs a widget and a constraint")
    return out
