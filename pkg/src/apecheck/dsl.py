"""Parser and printer for the line-oriented `.ape` app description language.

A file is a sequence of blocks closed by ``end``; indentation is ignored.
Example::

    app Demo
    entry Main
    bind goButton Main.onGo click layout

    activity Main
      gui progress dialog
      lifecycle onCreate
      end
      handler onGo
        start Fetch
      end
    end

    async Fetch task owner Main
      callback background
      end
      callback postExecute
        access dialog.dismiss progress
      end
    end
"""
from __future__ import annotations

import shlex
from dataclasses import dataclass, field
from typing import Optional

from .apiconfig import default_api_config
from .model import (
    ASYNC_KINDS, ASYNC_SLOTS, BINDING_KINDS, BINDING_SOURCES, CATCH_KINDS, GUI_KINDS,
    INPUT_FORMATS, LIFECYCLE_NAMES, ROLE_ASYNC, ROLE_HANDLER, ROLE_LIFECYCLE, ROLE_PLAIN,
    App, AsyncConstructDecl, Barrier, Binding, Call, ComponentDecl, EnvCondition, EnvIf,
    FragmentTransaction, GuiObjectDecl, InputConstraint, MethodDecl, PostToUi, ReadInput,
    Return, StartAsync, StartComponent, TryCatch, UiAccess, UiCreate, UiSafeCheckIf,
)


@dataclass(frozen=True)
class Diagnostic:
    code: str
    message: str
    line: int = 0
    col: int = 0

    def __str__(self) -> str:
        return f"{self.line}:{self.col}: {self.code}: {self.message}"


class ParseError(Exception):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        super().__init__("\n".join(str(d) for d in self.diagnostics))


# --- raw (unresolved) structures -------------------------------------------

@dataclass
class _Line:
    no: int
    col: int
    toks: list
    raw: str

    def col_of(self, i: int) -> int:
        if i >= len(self.toks):
            return self.col
        pos = self.raw.find(self.toks[i])
        return pos + 1 if pos >= 0 else self.col


@dataclass
class _RawMethod:
    owner: str
    name: str
    role: str
    body: list
    line: _Line


@dataclass
class _RawComponent:
    id: str
    kind: str
    host: Optional[str]
    line: _Line
    methods: list = field(default_factory=list)
    gui: list = field(default_factory=list)


@dataclass
class _RawAsync:
    id: str
    kind: str
    owner: str
    aware: bool
    line: _Line
    methods: list = field(default_factory=list)


class _Parser:
    def __init__(self, text: str):
        self.diags: list = []
        self.lines = self._lex(text)
        self.pos = 0

    # lexing
    def _lex(self, text: str) -> list:
        out = []
        for no, raw in enumerate(text.splitlines(), 1):
            try:
                toks = shlex.split(raw, comments=True, posix=True)
            except ValueError as exc:
                self.err("syntax", f"cannot tokenize line: {exc}", no, 1)
                continue
            if toks:
                col = len(raw) - len(raw.lstrip()) + 1
                out.append(_Line(no, col, toks, raw))
        return out

    def err(self, code, msg, line=0, col=0):
        self.diags.append(Diagnostic(code, msg, line, col))

    def err_at(self, ln: _Line, code, msg, tok: int = 0):
        self.err(code, msg, ln.no, ln.col_of(tok))

    def peek(self) -> Optional[_Line]:
        return self.lines[self.pos] if self.pos < len(self.lines) else None

    def next(self) -> Optional[_Line]:
        ln = self.peek()
        if ln is not None:
            self.pos += 1
        return ln

    def want(self, ln: _Line, n_min: int, n_max: int, usage: str) -> bool:
        if not (n_min <= len(ln.toks) <= n_max):
            self.err_at(ln, "syntax", f"expected '{usage}'")
            return False
        return True

    # top level
    def parse(self):
        name = entry = None
        comps: list = []
        asyncs: list = []
        binds: list = []
        self.barriers: list = []
        while True:
            ln = self.next()
            if ln is None:
                break
            kw = ln.toks[0]
            if kw == "app":
                if self.want(ln, 2, 2, "app <name>"):
                    if name is not None:
                        self.err_at(ln, "duplicate", "app name declared twice")
                    name = ln.toks[1]
            elif kw == "entry":
                if self.want(ln, 2, 2, "entry <activity>"):
                    if entry is not None:
                        self.err_at(ln, "duplicate", "entry declared twice")
                    entry = (ln.toks[1], ln)
            elif kw == "bind":
                if self.want(ln, 3, 5, "bind <widget> <Owner.method> [click|item|text] [code|layout]"):
                    kind, source = "click", "code"
                    for i, t in enumerate(ln.toks[3:], 3):
                        if t in BINDING_KINDS:
                            kind = t
                        elif t in BINDING_SOURCES:
                            source = t
                        else:
                            self.err_at(ln, "syntax", f"unknown binding option {t!r}", i)
                    binds.append((ln.toks[1], ln.toks[2], kind, source, ln))
            elif kw in ("activity", "service", "receiver"):
                if self.want(ln, 2, 2, f"{kw} <id>"):
                    comps.append(self.component(_RawComponent(ln.toks[1], kw, None, ln)))
                else:
                    self.skip_block()
            elif kw == "fragment":
                host = None
                if len(ln.toks) == 4 and ln.toks[2] == "host":
                    host = ln.toks[3]
                elif len(ln.toks) != 2:
                    self.err_at(ln, "syntax", "expected 'fragment <id> [host <activity>]'")
                if len(ln.toks) >= 2:
                    comps.append(self.component(_RawComponent(ln.toks[1], kw, host, ln)))
                else:
                    self.skip_block()
            elif kw == "async":
                t = ln.toks
                ok = len(t) in (5, 7) and t[3] == "owner" and (len(t) == 5 or t[5] == "lifecycle-aware")
                if not ok:
                    self.err_at(ln, "syntax", "expected 'async <id> <kind> owner <component> [lifecycle-aware yes|no]'")
                    self.skip_block()
                    continue
                if t[2] not in ASYNC_KINDS:
                    self.err_at(ln, "syntax", f"unknown async kind {t[2]!r}", 2)
                aware = t[2] == "loader"
                if len(t) == 7:
                    if t[6] not in ("yes", "no"):
                        self.err_at(ln, "syntax", "lifecycle-aware takes yes or no", 6)
                    aware = t[6] == "yes"
                asyncs.append(self.async_block(_RawAsync(t[1], t[2], t[4], aware, ln)))
            elif kw == "barrier":
                t = ln.toks
                if len(t) != 5 or t[1] not in ("p", "v"):
                    self.err_at(ln, "syntax", "expected 'barrier p <method> <index|end> <sem>' "
                                "or 'barrier v <component> <callback> <sem>'")
                    continue
                point = t[3]
                if t[1] == "p" and point != "end":
                    if not point.isdigit():
                        self.err_at(ln, "syntax", "barrier p point must be an index or 'end'", 3)
                        continue
                    point = int(point)
                if t[1] == "v" and point not in LIFECYCLE_NAMES:
                    self.err_at(ln, "lifecycle-name", f"illegal lifecycle callback name {point!r}", 3)
                self.barriers.append((Barrier(t[1].upper(), t[2], point, t[4]), ln))
            elif kw == "end":
                self.err_at(ln, "syntax", "unexpected 'end'")
            else:
                self.err_at(ln, "syntax", f"unknown top-level keyword {kw!r}")
        return name, entry, comps, asyncs, binds

    def skip_block(self):
        depth = 1
        while depth:
            ln = self.next()
            if ln is None:
                return
            if ln.toks[0] == "end":
                depth -= 1
            elif ln.toks[0] in _BLOCK_OPENERS:
                depth += 1

    def component(self, rc: _RawComponent) -> _RawComponent:
        while True:
            ln = self.next()
            if ln is None:
                self.err_at(rc.line, "syntax", f"component {rc.id} is missing 'end'")
                return rc
            kw = ln.toks[0]
            if kw == "end":
                return rc
            if kw == "gui":
                if self.want(ln, 3, 3, "gui <id> <kind>"):
                    if ln.toks[2] not in GUI_KINDS:
                        self.err_at(ln, "syntax", f"unknown gui kind {ln.toks[2]!r}", 2)
                    rc.gui.append((ln.toks[1], ln.toks[2], ln))
            elif kw in ("lifecycle", "handler", "method"):
                if not self.want(ln, 2, 2, f"{kw} <name>"):
                    self.method_body()
                    continue
                mname = ln.toks[1]
                if kw == "lifecycle" and mname not in LIFECYCLE_NAMES:
                    self.err_at(ln, "lifecycle-name", f"illegal lifecycle callback name {mname!r}", 1)
                role = {"lifecycle": ROLE_LIFECYCLE, "handler": ROLE_HANDLER, "method": ROLE_PLAIN}[kw]
                rc.methods.append(_RawMethod(rc.id, mname, role, self.method_body(), ln))
            else:
                self.err_at(ln, "syntax", f"unexpected {kw!r} inside component {rc.id}")
                if kw in _BLOCK_OPENERS:
                    self.skip_block()

    def async_block(self, ra: _RawAsync) -> _RawAsync:
        while True:
            ln = self.next()
            if ln is None:
                self.err_at(ra.line, "syntax", f"async {ra.id} is missing 'end'")
                return ra
            kw = ln.toks[0]
            if kw == "end":
                return ra
            if kw in ("callback", "method") and self.want(ln, 2, 2, f"{kw} <name>"):
                mname = ln.toks[1]
                if kw == "callback" and mname not in ASYNC_SLOTS:
                    self.err_at(ln, "syntax", f"unknown async callback slot {mname!r}", 1)
                role = ROLE_ASYNC if kw == "callback" else ROLE_PLAIN
                ra.methods.append(_RawMethod(ra.id, mname, role, self.method_body(), ln))
            else:
                self.err_at(ln, "syntax", f"unexpected {kw!r} inside async {ra.id}")
                if kw in _BLOCK_OPENERS:
                    self.skip_block()

    # statements: raw form is (kind, line, args...) resolved later
    def method_body(self) -> list:
        stmts, _ = self.stmt_list(("end",))
        return stmts

    def stmt_list(self, closers) -> tuple:
        out = []
        while True:
            ln = self.next()
            if ln is None:
                self.err("syntax", "unexpected end of file inside a block",
                         self.lines[-1].no if self.lines else 0, 1)
                return out, None
            kw = ln.toks[0]
            if kw in closers:
                if len(ln.toks) != 1 and kw != "catch":
                    self.err_at(ln, "syntax", f"'{kw}' takes no arguments")
                return out, ln
            st = self.stmt(ln)
            if st is not None:
                out.append(st)

    def stmt(self, ln: _Line):
        t = ln.toks
        kw = t[0]
        simple = {"call": 2, "start": 2, "create": 2, "startactivity": 2, "commit": 2, "read": 2,
                  "access": 3, "return": 1}
        if kw in simple:
            if not self.want(ln, simple[kw], simple[kw], f"{kw} ..."):
                return None
            return (kw, ln, *t[1:])
        if kw == "post":
            if not self.want(ln, 1, 2, "post [api]"):
                self.stmt_list(("end",))
                return None
            block, _ = self.stmt_list(("end",))
            return ("post", ln, t[1] if len(t) == 2 else "post", block)
        if kw == "ifsafe":
            neg = len(t) == 3 and t[1] == "not"
            if len(t) != 2 and not neg:
                self.err_at(ln, "syntax", "expected 'ifsafe [not] <check>'")
            then, orelse = self.if_branches()
            return ("ifsafe", ln, t[-1], neg, then, orelse)
        if kw == "if":
            cond = self.env_cond(ln, t[1:])
            then, orelse = self.if_branches()
            if cond is None:
                return None
            return ("if", ln, cond, then, orelse)
        if kw == "try":
            if len(t) != 1:
                self.err_at(ln, "syntax", "'try' takes no arguments")
            body, closer = self.stmt_list(("catch", "end"))
            handler = []
            exc = "io-available"
            if closer is not None and closer.toks[0] == "catch":
                if len(closer.toks) != 2 or closer.toks[1] not in CATCH_KINDS:
                    self.err_at(closer, "syntax", f"expected 'catch <{'|'.join(CATCH_KINDS)}>'")
                else:
                    exc = closer.toks[1]
                handler, _ = self.stmt_list(("end",))
            else:
                self.err_at(ln, "syntax", "'try' block needs a 'catch' clause")
            return ("try", ln, body, exc, handler)
        self.err_at(ln, "syntax", f"unknown statement {kw!r}")
        if kw in _BLOCK_OPENERS:
            self.skip_block()
        return None

    def if_branches(self) -> tuple:
        then, closer = self.stmt_list(("else", "end"))
        orelse: list = []
        if closer is not None and closer.toks[0] == "else":
            orelse, _ = self.stmt_list(("end",))
        return then, orelse

    def env_cond(self, ln: _Line, toks: list) -> Optional[EnvCondition]:
        neg = bool(toks) and toks[0] == "not"
        rest = toks[1:] if neg else toks
        bad = None
        if not rest:
            bad = "missing condition"
        elif rest[0] in ("wifi-enabled", "io-available", "storage-available"):
            if len(rest) == 1:
                return EnvCondition(rest[0], neg)
            bad = f"{rest[0]} takes no arguments"
        elif rest[0] == "permission-granted":
            if len(rest) == 2:
                return EnvCondition(rest[0], neg, rest[1])
            bad = "expected 'permission-granted <name>'"
        elif rest[0] == "input-matches":
            if len(rest) == 4 and rest[2] in ("format", "equals", "contains"):
                op, val = rest[2], rest[3]
                if op == "format" and val not in INPUT_FORMATS:
                    bad = f"unknown input format {val!r}"
                elif op == "contains" and len(val) != 1:
                    bad = "contains takes a single character"
                else:
                    return EnvCondition(rest[0], neg, rest[1], InputConstraint(op, val))
            else:
                bad = "expected 'input-matches <widget> format|equals|contains <value>'"
        else:
            bad = f"unknown condition {rest[0]!r}"
        self.err_at(ln, "syntax", bad)
        return None


_BLOCK_OPENERS = {"activity", "fragment", "service", "receiver", "async", "lifecycle", "handler",
                  "method", "callback", "post", "ifsafe", "if", "try"}


# --- resolution ------------------------------------------------------------

class _Resolver:
    def __init__(self, p: _Parser, comps, asyncs):
        self.p = p
        self.comps = {c.id: c for c in comps}
        self.asyncs = {a.id: a for a in asyncs}
        self.method_ids = set()
        self.gui_ids = set()
        for c in comps:
            for m in c.methods:
                self.method_ids.add(f"{c.id}.{m.name}")
            for gid, _, _ in c.gui:
                self.gui_ids.add(gid)
        for a in asyncs:
            for m in a.methods:
                self.method_ids.add(f"{a.id}.{m.name}")

    def unresolved(self, ln, what, ident, tok=1):
        self.p.err_at(ln, "unresolved", f"unknown {what} {ident!r}", tok)

    def method_ref(self, owner: str, ref: str) -> str:
        return ref if "." in ref else f"{owner}.{ref}"

    def body(self, owner: str, raw: list) -> tuple:
        out = []
        for r in raw:
            kw, ln = r[0], r[1]
            if kw == "call":
                target = self.method_ref(owner, r[2])
                if target not in self.method_ids:
                    self.unresolved(ln, "method", r[2])
                out.append(Call(target))
            elif kw == "start":
                if r[2] not in self.asyncs:
                    self.unresolved(ln, "async construct", r[2])
                out.append(StartAsync(r[2]))
            elif kw == "access":
                if r[3] not in self.gui_ids:
                    self.unresolved(ln, "gui object", r[3], 2)
                out.append(UiAccess(r[2], r[3]))
            elif kw == "create":
                out.append(UiCreate(r[2]))
            elif kw == "startactivity":
                c = self.comps.get(r[2])
                if c is None or c.kind != "activity":
                    self.unresolved(ln, "activity", r[2])
                out.append(StartComponent(r[2]))
            elif kw == "commit":
                c = self.comps.get(r[2])
                if c is None or c.kind != "fragment":
                    self.unresolved(ln, "fragment", r[2])
                out.append(FragmentTransaction(r[2]))
            elif kw == "read":
                out.append(ReadInput(r[2]))
            elif kw == "return":
                out.append(Return())
            elif kw == "post":
                out.append(PostToUi(self.body(owner, r[3]), r[2]))
            elif kw == "ifsafe":
                out.append(UiSafeCheckIf(r[2], self.body(owner, r[4]), self.body(owner, r[5]), r[3]))
            elif kw == "if":
                out.append(EnvIf(r[2], self.body(owner, r[3]), self.body(owner, r[4])))
            elif kw == "try":
                out.append(TryCatch(self.body(owner, r[2]), r[3], self.body(owner, r[4])))
        return tuple(out)


def parse_app(source: str, api=None) -> App:
    """Parse `.ape` text into a resolved App; raises ParseError listing every problem."""
    p = _Parser(source)
    name, entry, comps, asyncs, binds = p.parse()
    if name is None:
        p.err("syntax", "missing 'app <name>' line", 1, 1)
    if entry is None:
        p.err("unresolved", "missing 'entry <activity>' line", 1, 1)

    seen: dict = {}
    for d in list(comps) + list(asyncs):
        if d.id in seen:
            p.err_at(d.line, "duplicate", f"identifier {d.id!r} declared twice", 1)
        seen[d.id] = d
    gui_seen: set = set()
    for c in comps:
        names: set = set()
        for m in c.methods:
            if m.name in names:
                p.err_at(m.line, "duplicate", f"method {c.id}.{m.name} declared twice", 1)
            names.add(m.name)
        for gid, _, ln in c.gui:
            if gid in gui_seen:
                p.err_at(ln, "duplicate", f"gui object {gid!r} declared twice", 1)
            gui_seen.add(gid)
    for a in asyncs:
        names = set()
        for m in a.methods:
            if m.name in names:
                p.err_at(m.line, "duplicate", f"method {a.id}.{m.name} declared twice", 1)
            names.add(m.name)

    r = _Resolver(p, comps, asyncs)
    if entry is not None:
        c = r.comps.get(entry[0])
        if c is None or c.kind != "activity":
            r.unresolved(entry[1], "entry activity", entry[0])
    for c in comps:
        if c.host is not None and (c.host not in r.comps or r.comps[c.host].kind != "activity"):
            r.unresolved(c.line, "host activity", c.host, 3)
    for a in asyncs:
        if a.owner not in r.comps:
            r.unresolved(a.line, "owner component", a.owner, 4)

    barriers = []
    for b, ln in p.barriers:
        if b.op == "P":
            if b.target not in r.method_ids:
                r.unresolved(ln, "method", b.target, 2)
        elif b.target not in r.comps:
            r.unresolved(ln, "component", b.target, 2)
        barriers.append(b)

    widgets: set = set()
    bindings = []
    for w, mref, kind, source, ln in binds:
        if w in widgets:
            p.err_at(ln, "duplicate", f"widget {w!r} bound twice", 1)
        widgets.add(w)
        if mref not in r.method_ids:
            r.unresolved(ln, "method", mref, 2)
        bindings.append(Binding(w, mref, kind, source))

    components = []
    for c in comps:
        groups: dict = {ROLE_LIFECYCLE: [], ROLE_HANDLER: [], ROLE_PLAIN: []}
        for m in c.methods:
            mid = f"{c.id}.{m.name}"
            groups[m.role].append(MethodDecl(mid, c.id, m.role, r.body(c.id, m.body)))
        gui = tuple(GuiObjectDecl(gid, kind, c.id) for gid, kind, _ in c.gui)
        components.append(ComponentDecl(c.id, c.kind, tuple(groups[ROLE_LIFECYCLE]),
                                        tuple(groups[ROLE_HANDLER]), tuple(groups[ROLE_PLAIN]),
                                        gui, c.host))
    async_decls = []
    for a in asyncs:
        cbs = [MethodDecl(f"{a.id}.{m.name}", a.id, m.role, r.body(a.id, m.body))
               for m in a.methods if m.role == ROLE_ASYNC]
        plain = [MethodDecl(f"{a.id}.{m.name}", a.id, m.role, r.body(a.id, m.body))
                 for m in a.methods if m.role == ROLE_PLAIN]
        async_decls.append(AsyncConstructDecl(a.id, a.kind, a.owner, tuple(cbs), tuple(plain), a.aware))

    if p.diags:
        raise ParseError(sorted(p.diags, key=lambda d: (d.line, d.col)))
    return App(name, entry[0], tuple(components), tuple(async_decls), tuple(bindings),
               api=api if api is not None else default_api_config(), barriers=tuple(barriers))


def load_app(path, api=None) -> App:
    with open(path, encoding="utf-8") as fh:
        return parse_app(fh.read(), api)


# --- printer ----------------------------------------------------------------

def _q(s: str) -> str:
    return shlex.quote(s)


def _cond_text(c: EnvCondition) -> str:
    parts = ["not"] if c.negated else []
    parts.append(c.kind)
    if c.arg is not None:
        parts.append(_q(c.arg))
    if c.constraint is not None:
        parts += [c.constraint.op, _q(c.constraint.value)]
    return " ".join(parts)


def _stmt_lines(s, ind: str, owner: str) -> list:
    nxt = ind + "  "
    if isinstance(s, Call):
        return [f"{ind}call {s.target}"]
    if isinstance(s, StartAsync):
        return [f"{ind}start {s.async_id}"]
    if isinstance(s, UiAccess):
        return [f"{ind}access {s.api} {s.target}"]
    if isinstance(s, UiCreate):
        return [f"{ind}create {s.api}"]
    if isinstance(s, StartComponent):
        return [f"{ind}startactivity {s.target}"]
    if isinstance(s, FragmentTransaction):
        return [f"{ind}commit {s.target}"]
    if isinstance(s, ReadInput):
        return [f"{ind}read {s.widget}"]
    if isinstance(s, Return):
        return [f"{ind}return"]
    out = []
    if isinstance(s, PostToUi):
        out.append(f"{ind}post" + ("" if s.api == "post" else f" {s.api}"))
        out += _block_lines(s.block, nxt, owner)
    elif isinstance(s, (UiSafeCheckIf, EnvIf)):
        if isinstance(s, UiSafeCheckIf):
            out.append(f"{ind}ifsafe " + ("not " if s.negated else "") + s.check)
        else:
            out.append(f"{ind}if {_cond_text(s.cond)}")
        out += _block_lines(s.then, nxt, owner)
        if s.orelse:
            out.append(f"{ind}else")
            out += _block_lines(s.orelse, nxt, owner)
    elif isinstance(s, TryCatch):
        out.append(f"{ind}try")
        out += _block_lines(s.body, nxt, owner)
        out.append(f"{ind}catch {s.exception}")
        out += _block_lines(s.handler, nxt, owner)
    else:
        raise TypeError(f"not a statement: {s!r}")
    out.append(f"{ind}end")
    return out


def _block_lines(stmts, ind, owner) -> list:
    out = []
    for s in stmts:
        out += _stmt_lines(s, ind, owner)
    return out


def format_app(app: App) -> str:
    """Canonical `.ape` text; parse_app(format_app(a)) == a."""
    out = [f"app {app.name}", f"entry {app.entry}"]
    for b in app.bindings:
        out.append(f"bind {b.widget} {b.method} {b.kind} {b.source}")
    for b in app.barriers:
        out.append(f"barrier {b.op.lower()} {b.target} {b.point} {b.sem}")
    for c in app.components:
        out.append("")
        head = f"{c.kind} {c.id}"
        if c.host is not None:
            head += f" host {c.host}"
        out.append(head)
        for g in c.gui:
            out.append(f"  gui {g.id} {g.kind}")
        for kw, group in (("lifecycle", c.lifecycle), ("handler", c.handlers), ("method", c.methods)):
            for m in group:
                out.append(f"  {kw} {m.name}")
                out += _block_lines(m.body, "    ", c.id)
                out.append("  end")
        out.append("end")
    for a in app.asyncs:
        out.append("")
        head = f"async {a.id} {a.kind} owner {a.owner}"
        if a.lifecycle_aware != (a.kind == "loader"):
            head += " lifecycle-aware " + ("yes" if a.lifecycle_aware else "no")
        out.append(head)
        for kw, group in (("callback", a.callbacks), ("method", a.methods)):
            for m in group:
                out.append(f"  {kw} {m.name}")
                out += _block_lines(m.body, "    ", a.id)
                out.append("  end")
        out.append("end")
    return "\n".join(out) + "\n"
