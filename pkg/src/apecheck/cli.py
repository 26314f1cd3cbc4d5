"""Command-line front end.

Exit codes: 0 nothing found, 1 findings (candidates, confirmed errors,
crashes or races), 2 input error.  JSON goes to stdout with sorted keys so
repeated runs are byte-identical; --out also writes it to files.
"""
from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .apiconfig import ApiConfigError, load_api_config
from .baselines import collect_logs, detect_races_in, fuzz
from .callgraph import build_call_graph
from .detector import detect_apes
from .dsl import ParseError, load_app
from .sim import SimulationError, run
from .traces import TraceLimits, generate_traces, traces_to_json
from .validate import validate_app
from .verifier import TestCase, synthesized_tests, verify_all

EXIT_CLEAN, EXIT_FOUND, EXIT_INPUT = 0, 1, 2


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    apiConfigPath: Optional[str] = None
    maxTraceCnt: int = 10
    maxTraceLen: int = 20
    outputDir: Optional[str] = None
    seed: int = 0
    eventBudget: int = 10_000
    jobs: int = 1
    scheduleMode: str = "barrier"  # verify replays under barrier schedules

    @property
    def limits(self) -> TraceLimits:
        return TraceLimits(self.maxTraceCnt, self.maxTraceLen)


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2) + "\n"


def _emit(cfg: RunConfig, name: str, obj) -> None:
    text = dumps(obj)
    sys.stdout.write(text)
    if cfg.outputDir:
        out = Path(cfg.outputDir)
        out.mkdir(parents=True, exist_ok=True)
        (out / name).write_text(text)


def _write(cfg: RunConfig, rel: str, obj) -> None:
    if cfg.outputDir:
        path = Path(cfg.outputDir) / rel
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(dumps(obj))


def _load(path: str, cfg: RunConfig):
    try:
        api = load_api_config(cfg.apiConfigPath) if cfg.apiConfigPath else None
        app = load_app(path, api)
    except (OSError, ApiConfigError) as e:
        raise InputError(str(e))
    except ParseError as e:
        raise InputError("\n".join(f"{path}:{d}" for d in e.diagnostics))
    diags = validate_app(app)
    if diags:
        raise InputError("\n".join(f"{path}:{d}" for d in diags))
    return app


def cmd_analyze(args, cfg: RunConfig) -> int:
    app = _load(args.app, cfg)
    cg = build_call_graph(app)
    cands = detect_apes(app, cg)
    _emit(cfg, "candidates.json", {"app": app.name, "candidates": [c.to_json() for c in cands]})
    _write(cfg, "traces.json",
           [traces_to_json(c, generate_traces(cg, c, cfg.limits)) for c in cands])
    return EXIT_FOUND if cands else EXIT_CLEAN


def cmd_verify(args, cfg: RunConfig) -> int:
    app = _load(args.app, cfg)
    summary = verify_all(app, cfg.limits, cfg.jobs)
    _emit(cfg, "summary.json", summary.to_json())
    for k, o in enumerate(summary.outcomes):
        _write(cfg, f"reports/candidate-{k:02d}.json", o.to_json())
    return EXIT_FOUND if summary.reproduced else EXIT_CLEAN


def cmd_fuzz(args, cfg: RunConfig) -> int:
    app = _load(args.app, cfg)
    res = fuzz(app, cfg.eventBudget, cfg.seed)
    out = res.to_json()
    out["app"] = app.name
    _emit(cfg, "fuzz.json", out)
    return EXIT_FOUND if res.crashes else EXIT_CLEAN


def cmd_races(args, cfg: RunConfig) -> int:
    app = _load(args.app, cfg)
    tests = synthesized_tests(app, cfg.limits)
    logs = collect_logs(app, tests, args.schedule)
    reports = detect_races_in(logs)
    _emit(cfg, "races.json", {
        "app": app.name, "schedule": args.schedule, "tests": len(tests), "logs": len(logs),
        "races": [r.to_json() for r in reports],
        "sites": sorted(f"{r.site[0]}:{r.site[1]}" for r in reports),
    })
    return EXIT_FOUND if reports else EXIT_CLEAN


def cmd_simulate(args, cfg: RunConfig) -> int:
    app = _load(args.app, cfg)
    try:
        tc = TestCase.from_json(json.loads(Path(args.testcase).read_text()))
    except (OSError, ValueError, KeyError) as e:
        raise InputError(f"{args.testcase}: {e}")
    try:
        res = run(app, tc.events, tc.environment, tc.schedule, trace=True)
    except SimulationError as e:
        raise InputError(str(e))
    out = res.to_json()
    out["log"] = res.log
    _emit(cfg, "simulation.json", out)
    return EXIT_FOUND if res.crash else EXIT_CLEAN


def cmd_graph(args, cfg: RunConfig) -> int:
    app = _load(args.app, cfg)
    cg = build_call_graph(app)
    _emit(cfg, "callgraph.json", {"app": app.name, "nodes": list(cg.nodes),
                                  "edges": [str(e) for e in cg.edges]})
    return EXIT_CLEAN


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="apecheck",
                                description="Find and reproduce async programming errors.")
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--api-config", dest="api_config")
    common.add_argument("--max-traces", type=int, default=10)
    common.add_argument("--max-len", type=int, default=20)
    common.add_argument("--out")
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--budget", type=int, default=10_000)
    common.add_argument("--jobs", type=int, default=1)
    sub = p.add_subparsers(dest="command", required=True)
    for name, fn, help_ in [
        ("analyze", cmd_analyze, "detect candidates and generate traces"),
        ("verify", cmd_verify, "confirm candidates by scheduled replay"),
        ("fuzz", cmd_fuzz, "random GUI fuzzing baseline"),
        ("races", cmd_races, "happens-before race detection baseline"),
        ("simulate", cmd_simulate, "run a stored test case"),
        ("graph", cmd_graph, "print the call graph"),
    ]:
        sp = sub.add_parser(name, parents=[common], help=help_)
        sp.add_argument("app")
        if name == "simulate":
            sp.add_argument("testcase")
        if name == "races":
            sp.add_argument("--schedule", choices=("exhaustive", "eager"), default="exhaustive")
        sp.set_defaults(fn=fn)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_INPUT if e.code else EXIT_CLEAN
    try:
        cfg = RunConfig(args.api_config, args.max_traces, args.max_len, args.out, args.seed,
                        args.budget, args.jobs)
        if cfg.eventBudget < 0 or cfg.jobs < 1:
            raise InputError("--budget must be >= 0 and --jobs >= 1")
        return args.fn(args, cfg)
    except (InputError, ValueError) as e:
        sys.stderr.write(f"error: {e}\n")
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
