"""Seeded random apps and a brute-force crash oracle for them.

Generated apps stay small (at most 12 methods and 2 async constructs) so the
oracle can afford to try every short event sequence, every relevant
environment and every async interleaving.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

from .dsl import parse_app
from .model import EnvCondition, EnvIf, TryCatch, flatten
from .sim.engine import SimulationError
from .sim.explore import explore_all_schedules
from .synth import FORMAT_SAMPLES, Environment, UiEvent
from .validate import validate_app

# relative construct usage in open-source apps; tasks dominate, loaders are rare
KIND_WEIGHTS = {"task": 2968, "thread": 1248, "intent-service": 286, "loader": 35}
SLOTS = {
    "task": ("preExecute", "background", "postExecute"),
    "thread": ("background",),
    "loader": ("preExecute", "background", "postExecute"),
    "intent-service": ("background", "postExecute"),
}
ENV_ATOMS = (
    "wifi-enabled", "permission-granted camera", "storage-available", "io-available",
    "input-matches box format email", "input-matches box equals ok",
    "input-matches box contains z",
)
GUI_API = {"dialog": "dialog.dismiss", "view": "view.setText",
           "list-adapter": "adapter.notifyDataSetChanged"}
MAX_METHODS = 12
MAX_ASYNCS = 2


@dataclass
class _Comp:
    name: str
    kind: str
    host: str = None
    gui: tuple = ()
    handlers: tuple = ()
    plain: tuple = ()


class _Gen:
    def __init__(self, rng: random.Random):
        self.rng = rng
        self.env_atom = rng.choice(ENV_ATOMS) if rng.random() < 0.5 else None

    def gui_for(self, comp):
        kinds = self.rng.sample(sorted(GUI_API), self.rng.randint(1, 2))
        return tuple((f"{comp.lower()}{k.title().replace('-', '')}", k) for k in kinds)

    def cond(self):
        neg = "not " if self.rng.random() < 0.5 else ""
        return f"if {neg}{self.env_atom}"

    def wrap(self, lines, ind):
        """Optionally nest lines under an env branch or a try/catch."""
        r = self.rng.random()
        if self.env_atom and r < 0.35:
            if self.env_atom in ("storage-available", "io-available") and r < 0.15:
                body = [ind + "try", *["  " + x for x in lines], ind + f"catch {self.env_atom}",
                        ind + "  return", ind + "end"]
                return body
            return [ind + self.cond(), *["  " + x for x in lines], ind + "end"]
        return lines


def _pick_kind(rng):
    kinds = sorted(KIND_WEIGHTS)
    return rng.choices(kinds, weights=[KIND_WEIGHTS[k] for k in kinds])[0]


def random_app_source(seed: int) -> str:
    rng = random.Random(seed)
    g = _Gen(rng)
    comps = [_Comp("Main", "activity")]
    if rng.random() < 0.35:
        comps.append(_Comp("Second", "activity"))
    if rng.random() < 0.3:
        comps.append(_Comp("Frag", "fragment", host="Main"))
    names = {c.name for c in comps}
    for c in comps:
        c.gui = g.gui_for(c.name)
        nh = rng.randint(1, 2) if c.name == "Main" else rng.randint(0, 1)
        c.handlers = tuple(f"on{c.name}{i}" for i in range(nh))
    comps[0].plain = ("helper",) if rng.random() < 0.4 else ()

    asyncs = []
    for i in range(rng.randint(1, MAX_ASYNCS)):
        kind = _pick_kind(rng)
        owner = rng.choice([c for c in comps if c.kind in ("activity", "fragment")])
        asyncs.append((f"Job{i}", kind, owner))

    n_methods = sum(1 + len(c.handlers) + len(c.plain) for c in comps)
    n_methods += sum(len(SLOTS[k]) for _, k, _ in asyncs)
    while n_methods > MAX_METHODS and len(asyncs) > 1:
        n_methods -= len(SLOTS[asyncs[-1][1]])
        asyncs.pop()

    by_name = {c.name: c for c in comps}

    def chain(comp):
        out = [comp]
        while comp.host:
            comp = by_name[comp.host]
            out.append(comp)
        return out

    def ui_stmt(comp, ind):
        ch = chain(comp)
        opts = ["access"]
        startable = [a for a in asyncs if a[2] in ch]
        if startable:
            opts += ["start", "start"]
        if comp.name == "Main" and "Second" in names:
            opts.append("startactivity")
        if "Frag" in names and any(c.name == "Main" for c in ch):
            opts.append("commit")
        if comps[0].plain and any(c.name == "Main" for c in ch):
            opts.append("call")
        o = rng.choice(opts)
        if o == "access":
            gid, k = rng.choice([x for c in ch for x in c.gui])
            return [f"{ind}access {GUI_API[k]} {gid}"]
        if o == "start":
            return g.wrap([f"{ind}start {rng.choice(startable)[0]}"], ind)
        if o == "startactivity":
            return [f"{ind}startactivity Second"]
        if o == "commit":
            return [f"{ind}commit Frag"]
        return [f"{ind}call Main.helper"]

    def offending(owner, ind, slot):
        ch = chain(owner)
        gid, k = rng.choice([x for c in ch for x in c.gui])
        access = f"{ind}access {GUI_API[k]} {gid}"
        if slot == "postExecute":
            opts = [access, access]
            if "Frag" in names and any(c.name == "Main" for c in ch):
                opts.append(f"{ind}commit Frag")
            if "Second" in names:
                opts.append(f"{ind}startactivity Second")
        elif slot == "preExecute":
            opts = [f"{ind}create dialog.create", access]
        else:
            opts = [access, f"{ind}create toast.show"]
            if comps[0].plain and any(c.name == "Main" for c in ch):
                opts.append(f"{ind}call Main.helper")
        s = rng.choice(opts)
        r = rng.random()
        if r < 0.2 and slot == "background":
            return [f"{ind}post", "  " + s, f"{ind}end"]
        if r < 0.4 and slot == "postExecute" and "access" in s:
            probe = rng.choice(["not activity.isFinishing", "fragment.isAdded"])
            return [f"{ind}ifsafe {probe}", "  " + s, f"{ind}end"]
        return g.wrap([s], ind)

    lines = ["app Random", "entry Main"]
    for c in comps:
        for h in c.handlers:
            kind = rng.choice(["click", "click", "item"])
            lines.append(f"bind w{h} {c.name}.{h} {kind} code")
    lines.append("")
    for c in comps:
        head = f"fragment {c.name} host {c.host}" if c.kind == "fragment" else f"activity {c.name}"
        lines.append(head)
        for gid, k in c.gui:
            lines.append(f"  gui {gid} {k}")
        for kw, name in [("lifecycle", "onCreate")] + [("handler", h) for h in c.handlers] \
                + [("method", p) for p in c.plain]:
            lines.append(f"  {kw} {name}")
            if name == "helper":
                body = [f"    access {GUI_API[c.gui[0][1]]} {c.gui[0][0]}"]
                if g.env_atom and g.env_atom.startswith("input-matches"):
                    body.append("    read box")
            else:
                body = []
                for _ in range(rng.randint(0, 2)):
                    body += ui_stmt(c, "    ")
            lines += body
            lines.append("  end")
        lines.append("end")
        lines.append("")
    for aid, kind, owner in asyncs:
        extra = " lifecycle-aware yes" if kind == "loader" else ""
        lines.append(f"async {aid} {kind} owner {owner.name}{extra}")
        for slot in SLOTS[kind]:
            lines.append(f"  callback {slot}")
            if slot == "background" or rng.random() < 0.7:
                lines += offending(owner, "    ", slot)
            lines.append("  end")
        lines.append("end")
        lines.append("")
    return "\n".join(lines)


def random_app(seed: int):
    """A valid random app; seeds whose draw fails validation are skipped forward."""
    s = seed
    while True:
        try:
            app = parse_app(random_app_source(s))
        except Exception:
            s += 10_007
            continue
        if not validate_app(app):
            return app
        s += 10_007


def random_corpus(n: int, seed: int = 0) -> list:
    return [random_app(seed * 100_003 + i) for i in range(n)]


# --- oracle ---------------------------------------------------------------------

def env_conditions(app) -> list:
    out = []
    for mid in app.methods:
        for s, _ in flatten(app.method(mid).body):
            if isinstance(s, EnvIf):
                out.append(s.cond)
            elif isinstance(s, TryCatch):
                out.append(EnvCondition(s.exception))
    return out


def _representatives(constraints) -> list:
    """One text per distinct truth assignment of the constraints on a widget."""
    pool = ["", "x", *FORMAT_SAMPLES.values()]
    pool += [c.value for c in constraints if c.op != "format"]
    seen = {}
    for v in pool:
        seen.setdefault(tuple(c.matches(v) for c in constraints), v)
    return sorted(seen.values())


def candidate_environments(app) -> list:
    """Every combination of the settings, faults and input values the app tests."""
    wifi, perms, faults, inputs = [True], set(), set(), {}
    for c in env_conditions(app):
        if c.kind == "wifi-enabled":
            wifi = [True, False]
        elif c.kind == "permission-granted":
            perms.add(c.arg)
        elif c.kind == "io-available":
            faults.add("io-failure")
        elif c.kind == "storage-available":
            faults.add("storage-unavailable")
        else:
            inputs.setdefault(c.arg, []).append(c.constraint)
    values = {w: _representatives(cs) for w, cs in inputs.items()}
    perms, faults = sorted(perms), sorted(faults)
    widgets = sorted(values)
    envs = []
    for w in wifi:
        for pmask in itertools.product((False, True), repeat=len(perms)):
            for fmask in itertools.product((False, True), repeat=len(faults)):
                for vals in itertools.product(*[values[x] for x in widgets]):
                    envs.append(Environment(
                        inputs=tuple(zip(widgets, vals)), wifi=w,
                        permissions=tuple(p for p, on in zip(perms, pmask) if on),
                        faults=tuple(f for f, on in zip(faults, fmask) if on)))
    return envs


def event_alphabet(app) -> list:
    out = []
    for b in app.bindings:
        if b.kind == "item":
            out.append(UiEvent("listItemClick", b.widget, 0))
        elif b.kind == "text":
            out.append(UiEvent("input", b.widget, text="x"))
        else:
            out.append(UiEvent("click", b.widget))
    return out + [UiEvent("rotate"), UiEvent("home"), UiEvent("back")]


def oracle_crash_sites(app, depth: int = 3, bound: int = 5_000) -> set:
    """Crash sites over all sequences launch+(<= depth events), environments and schedules.

    Only maximal sequences are explored: every schedule of a sequence is a
    prefix of some schedule of its extensions (the explorer may finish all
    async work before injecting the next event), so a shorter sequence is
    explored only when none of its extensions can run (the app has exited).
    """
    sites = set()
    alphabet = event_alphabet(app)

    def visit(seq, env) -> bool:
        if len(seq) <= depth and any([visit(seq + (e,), env) for e in alphabet]):
            return True
        try:
            ex = explore_all_schedules(app, seq, env, bound=bound)
        except SimulationError:
            return False  # an event after the app exited
        sites.update(ex.crash_sites)
        return True

    for env in candidate_environments(app):
        visit((UiEvent("launch"),), env)
    return sites
