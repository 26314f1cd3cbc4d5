import json
from pathlib import Path

import pytest

from apecheck.cli import RunConfig, main

from conftest import fixture_path

SNAPSHOTS = Path(__file__).parent / "snapshots"


def cli(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


def test_defaults():
    cfg = RunConfig()
    assert (cfg.maxTraceCnt, cfg.maxTraceLen, cfg.scheduleMode) == (10, 20, "barrier")
    assert cfg.eventBudget == 10_000


def test_analyze_adsdroid(capsys, tmp_path):
    code, out, _ = cli(capsys, "analyze", fixture_path("adsdroid"), "--out", tmp_path)
    assert code == 1
    assert len(json.loads(out)["candidates"]) == 2
    assert (tmp_path / "candidates.json").read_text() == out
    traces = json.loads((tmp_path / "traces.json").read_text())
    assert [len(t["traces"]) for t in traces] == [1, 1]


def test_analyze_compliant(capsys):
    assert cli(capsys, "analyze", fixture_path("compliant"))[0] == 0


def test_analyze_missing(capsys):
    code, _, err = cli(capsys, "analyze", "missing.ape")
    assert code == 2 and "error" in err


def test_parse_errors_are_input_errors(capsys, tmp_path):
    bad = tmp_path / "bad.ape"
    bad.write_text("app X\nentry Nope\n")
    code, _, err = cli(capsys, "analyze", bad)
    assert code == 2 and "unresolved" in err


def test_bad_flags(capsys):
    assert cli(capsys, "fuzz", fixture_path("adsdroid"), "--budget", "-1")[0] == 2
    assert cli(capsys, "frobnicate")[0] == 2
    assert cli(capsys, "analyze", fixture_path("adsdroid"), "--max-traces", "0")[0] == 2


def test_verify_adsdroid(capsys, tmp_path):
    code, out, _ = cli(capsys, "verify", fixture_path("adsdroid"), "--out", tmp_path)
    assert code == 1
    assert json.loads(out)["reproduced"] == 2
    reports = sorted((tmp_path / "reports").iterdir())
    assert [p.name for p in reports] == ["candidate-00.json", "candidate-01.json"]


def test_verify_gisapp(capsys):
    _, out, _ = cli(capsys, "verify", fixture_path("gisapp"))
    (o,) = json.loads(out)["outcomes"]
    assert o["status"] == "confirmed" and o["report"]["exception"] == "RuntimeExceptionLooper"


def test_verify_compliant(capsys):
    code, out, _ = cli(capsys, "verify", fixture_path("compliant"))
    d = json.loads(out)
    assert code == 0
    assert (d["detected"], d["processed"], d["reproduced"], d["falsePositiveSuspects"]) == (0, 0, 0, 0)


def test_fuzz_snapshot(capsys):
    code, out, _ = cli(capsys, "fuzz", fixture_path("adsdroid"), "--budget", 10_000, "--seed", 7)
    assert code == 1
    assert out == (SNAPSHOTS / "fuzz_adsdroid_b10000_s7.json").read_text()


def test_fuzz_zero_budget(capsys):
    code, out, _ = cli(capsys, "fuzz", fixture_path("adsdroid"), "--budget", 0)
    assert code == 0 and json.loads(out)["crashes"] == []


def test_races(capsys):
    code, out, _ = cli(capsys, "races", fixture_path("adsdroid"))
    assert code == 1 and len(json.loads(out)["sites"]) >= 1
    code, out, _ = cli(capsys, "races", fixture_path("adsdroid"), "--schedule", "eager")
    assert code == 0 and json.loads(out)["sites"] == []


def test_simulate_round_trip(capsys, tmp_path):
    cli(capsys, "verify", fixture_path("adsdroid"), "--out", tmp_path)
    rep = json.loads((tmp_path / "reports" / "candidate-00.json").read_text())
    tc = tmp_path / "tc.json"
    tc.write_text(json.dumps(rep["testCase"]))
    code, out, _ = cli(capsys, "simulate", fixture_path("adsdroid"), tc)
    sim = json.loads(out)
    assert code == 1
    assert sim["crash"] == rep["report"]
    assert "SearchByPartName.postExecute" in sim["log"][-1]


def test_simulate_bad_testcase(capsys, tmp_path):
    tc = tmp_path / "tc.json"
    tc.write_text('{"events": [{"kind": "teleport"}]}')
    assert cli(capsys, "simulate", fixture_path("adsdroid"), tc)[0] == 2


def test_graph(capsys):
    code, out, _ = cli(capsys, "graph", fixture_path("adsdroid"))
    assert code == 0
    assert ("SearchByPartName.postExecute -> PartList.onCreate [icc] @SearchByPartName.postExecute:1"
            in json.loads(out)["edges"])


def test_api_config_override(capsys, tmp_path):
    from apecheck.apiconfig import default_api_config, format_api_config
    cfg = tmp_path / "api.cfg"
    cfg.write_text(format_api_config(default_api_config()))
    code, out, _ = cli(capsys, "analyze", fixture_path("adsdroid"), "--api-config", cfg)
    assert code == 1 and out == cli(capsys, "analyze", fixture_path("adsdroid"))[1]
    # access statements must name a configured ui-access API
    cfg.write_text("[ui-access]\nadapter.notifyDataSetChanged\n[ui-create]\ntoast.show\n")
    code, _, err = cli(capsys, "analyze", fixture_path("adsdroid"), "--api-config", cfg)
    assert code == 2 and "dialog.dismiss" in err
    cfg.write_text("[wrong]\n")
    assert cli(capsys, "analyze", fixture_path("adsdroid"), "--api-config", cfg)[0] == 2
