import pytest
from hypothesis import given, settings, strategies as st

from apecheck import build_call_graph, classify_pattern, detect_apes, is_guarded, parse_app
from apecheck.corpus import random_app
from apecheck.detector import ASYNC, STALE, lexically_guarded, reachable_starts
from apecheck.model import UI_TOUCHING, StartAsync, UiAccess, UiCreate, FragmentTransaction

from conftest import COMPLIANT, analyzed, load

TEMPLATE = """app G
entry Main
activity Main
  gui progress dialog
  gui label view
  lifecycle onCreate
    start Job
  end
end
async Job {kind} owner Main
{slots}
end
"""


def app_with(kind, slots):
    return parse_app(TEMPLATE.format(kind=kind, slots=slots))


def test_adsdroid_two_p3(adsdroid):
    app, cg, cands = adsdroid
    assert [(c.pattern, c.stmtAccessUI) for c in cands] == [
        ("P3", ("SearchByPartName.postExecute", 0)),
        ("P3", ("DownloadDatasheet.postExecute", 0)),
    ]
    assert cands[0].stmtStartThread == ("SearchPanel.searchByPartName", 1)


def test_pedometer_p1():
    _, _, cands = analyzed("pedometer")
    assert [c.pattern for c in cands] == ["P1"]


def test_gisapp_p2():
    _, _, cands = analyzed("gisapp")
    assert [c.pattern for c in cands] == ["P2"]


@pytest.mark.parametrize("name", COMPLIANT)
def test_compliant_fixtures_clean(name):
    assert analyzed(name)[2] == []


@pytest.mark.parametrize("name", COMPLIANT)
def test_compliant_fixtures_have_shadow_sites(name):
    """Stripping protections exposes the sites the guards protect."""
    app = load(name)
    assert detect_apes(app, build_call_graph(app), guards=False)


def test_guarded_by_negated_dead_probe_else_branch():
    app = app_with("task", """  callback background
  end
  callback postExecute
    ifsafe activity.isFinishing
    else
      access dialog.dismiss progress
    end
  end""")
    cg = build_call_graph(app)
    site = ("Job.postExecute", 1)
    assert isinstance(app.stmt_at(site), UiAccess)
    assert is_guarded(app, site, cg)
    assert detect_apes(app, cg) == []


def test_unguarded_dismiss():
    app = app_with("task", """  callback background
  end
  callback postExecute
    access dialog.dismiss progress
  end""")
    assert not is_guarded(app, ("Job.postExecute", 0), build_call_graph(app))


def test_posted_access_in_thread_is_guarded():
    app = app_with("thread", """  callback background
    post
      access view.setText label
    end
  end""")
    cg = build_call_graph(app)
    assert is_guarded(app, ("Job.background", 1), cg)
    assert lexically_guarded(app, ("Job.background", 1))


def test_alive_branch_does_not_guard_background():
    """A liveness check does not make an off-thread access legal."""
    app = app_with("thread", """  callback background
    ifsafe not activity.isFinishing
      access view.setText label
    end
  end""")
    cands = detect_apes(app, build_call_graph(app))
    assert [c.pattern for c in cands] == ["P1"]


def test_env_if_does_not_guard():
    app = app_with("task", """  callback background
    if not wifi-enabled
      create toast.show
    end
  end""")
    assert [c.pattern for c in detect_apes(app, build_call_graph(app))] == ["P2"]


def test_interprocedural_all_paths_must_be_guarded():
    src = TEMPLATE.format(kind="task", slots="""  callback background
  end
  callback postExecute
    ifsafe not activity.isFinishing
      call Main.hide
    end
    call Main.hide
  end""").replace("  lifecycle onCreate", "  method hide\n    access dialog.dismiss progress\n  end\n  lifecycle onCreate")
    app = parse_app(src)
    cands = detect_apes(app, build_call_graph(app))
    assert [(c.pattern, c.stmtAccessUI) for c in cands] == [("P3", ("Main.hide", 0))]
    assert cands[0].path[-1] == "Main.hide"


def test_classify_table():
    app = load("adsdroid")
    assert classify_pattern(app, UiAccess("adapter.notifyDataSetChanged", "x"), ASYNC) == "P1"
    assert classify_pattern(app, UiCreate("toast.show"), ASYNC) == "P2"
    assert classify_pattern(app, UiAccess("dialog.dismiss", "x"), STALE) == "P3"
    assert classify_pattern(app, FragmentTransaction("F"), STALE) == "P3"
    with pytest.raises(ValueError):
        classify_pattern(app, UiCreate("toast.show"), STALE)


def test_unreachable_start_not_reported():
    src = TEMPLATE.format(kind="task", slots="""  callback background
  end
  callback postExecute
    access dialog.dismiss progress
  end""").replace("    start Job\n", "").replace("end\nasync", "  method dead\n    start Job\n  end\nend\nasync", 1)
    app = parse_app(src)
    assert detect_apes(app, build_call_graph(app)) == []


def test_duplicate_paths_reported_once():
    _, _, cands = analyzed("diamond")
    assert len(cands) == 1


def test_loader_reported_like_task():
    _, _, cands = analyzed("loader")
    assert [c.pattern for c in cands] == ["P3"]


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**5))
def test_candidate_invariants(seed):
    app = random_app(seed)
    cg = build_call_graph(app)
    starts = {(m, i) for m, i, _ in reachable_starts(app, cg)}
    cands = detect_apes(app, cg)
    assert len({c.stmtAccessUI for c in cands}) == len(cands)
    for c in cands:
        start = app.stmt_at(c.stmtStartThread)
        assert isinstance(start, StartAsync) and start.async_id == c.asyncId
        assert tuple(c.stmtStartThread) in starts
        assert isinstance(app.stmt_at(c.stmtAccessUI), UI_TOUCHING)
        # path witness: callback of the construct down to the faulty method via call edges
        assert c.path[0] in {m.id for m in app.async_(c.asyncId).all_methods()}
        assert c.path[-1] == c.methodAccessUI
        for a, b in zip(c.path, c.path[1:]):
            assert b in {e.callee for e in cg.callees(a)}
        assert not lexically_guarded(app, c.stmtAccessUI) or c.pattern == "P1"


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**5))
def test_guards_only_remove(seed):
    app = random_app(seed)
    cg = build_call_graph(app)
    guarded = {c.stmtAccessUI for c in detect_apes(app, cg)}
    shadow = {c.stmtAccessUI for c in detect_apes(app, cg, guards=False)}
    assert guarded <= shadow
