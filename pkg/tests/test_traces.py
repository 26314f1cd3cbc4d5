import pytest
from hypothesis import given, settings, strategies as st

from apecheck import TraceLimits, build_call_graph, callers_of, generate_traces, parse_app
from apecheck.corpus import random_app
from apecheck.detector import detect_apes
from apecheck.model import EnvCondition
from apecheck.traces import (
    FAILED, PENDING, TERMINATED, Trace, get_acyclic_callers, handler_projection, update_trace,
)

from conftest import analyzed

UNBOUNDED = TraceLimits(10**6, 10**6)


def oracle_chains(cg, cand, max_len=10**6):
    """All backward caller paths, enumerated edge by edge with plain recursion."""
    app = cg.app
    entry = app.entry_callbacks()
    done = []

    def walk(chain):
        m = chain[-1]
        if len(chain) > 1 and m in entry:
            done.append((TERMINATED, tuple(chain)))
            return
        if len(chain) >= max_len:
            done.append((FAILED, tuple(chain)))
            return
        callers = [e.caller for e in callers_of(cg, m) if e.caller not in chain]
        if not callers:
            done.append((FAILED, tuple(chain)))
        for c in callers:
            walk(chain + [c])

    walk([cand.methodAccessUI])
    return sorted(done)


def result_chains(traces):
    return sorted((t.state, tuple(t.chain)) for t in traces)


def test_defaults():
    assert TraceLimits() == TraceLimits(10, 20)
    with pytest.raises(ValueError):
        TraceLimits(0, 5)


def test_adsdroid_download_projection(adsdroid):
    app, cg, cands = adsdroid
    traces = generate_traces(cg, cands[1])
    term = [t for t in traces if t.state == TERMINATED]
    assert [handler_projection(t, app) for t in term] == [["searchByPartName", "onListItemClick"]]


def test_handler_started_async_chain_of_two():
    app, cg, cands = analyzed("gisapp")
    (t,) = generate_traces(cg, cands[0])
    assert t.state == TERMINATED
    assert t.chain == ["ExportTask.background", "MapActivity.onExport"]


def test_diamond_two_traces_match_brute_force():
    app, cg, cands = analyzed("diamond")
    traces = generate_traces(cg, cands[0])
    assert len([t for t in traces if t.state == TERMINATED]) == 2
    assert result_chains(traces) == oracle_chains(cg, cands[0])


def test_mutual_recursion():
    app, cg, cands = analyzed("recursion")
    t = Trace(PENDING, "Main.ping", None, ["Job.background", "Main.pong", "Main.ping"],
              [], {"Job.background", "Main.pong", "Main.ping"})
    assert [e.caller for e in callers_of(cg, "Main.ping")] == ["Main.onGo", "Main.pong"]
    assert [e.caller for e in get_acyclic_callers(t, cg)] == ["Main.onGo"]
    (tr,) = generate_traces(cg, cands[0])
    assert tr.chain == ["Job.background", "Main.pong", "Main.ping", "Main.onGo"]


def test_self_recursion_removed():
    src = """app S
entry Main
bind go Main.onGo click code
activity Main
  gui label view
  lifecycle onCreate
  end
  handler onGo
    call spin
  end
  method spin
    call spin
  end
end
"""
    cg = build_call_graph(parse_app(src))
    t = Trace(PENDING, "Main.spin", None, ["Main.spin"], [], {"Main.spin"})
    assert [e.caller for e in get_acyclic_callers(t, cg)] == ["Main.onGo"]


def test_linear_chain_singletons():
    app, cg, cands = analyzed("pedometer")
    (t,) = generate_traces(cg, cands[0])
    for m in t.chain[:-1]:
        assert len(callers_of(cg, m)) == 1


def test_update_trace_records_negated_wifi():
    app, cg, cands = analyzed("envgate")
    (t,) = generate_traces(cg, cands[0])
    assert EnvCondition("wifi-enabled", negated=True) in t.conditions


def test_update_trace_records_catch_as_negated_io():
    src = """app T
entry Main
bind go Main.onGo click code
activity Main
  lifecycle onCreate
  end
  handler onGo
    start Job
  end
end
async Job task owner Main
  callback background
    try
      read box
    catch io-available
      create toast.show
    end
  end
end
"""
    app = parse_app(src)
    cg = build_call_graph(app)
    (cand,) = detect_apes(app, cg)
    (t,) = generate_traces(cg, cand)
    assert t.conditions == [EnvCondition("io-available", negated=True)]


def test_update_trace_top_level_unchanged():
    app, cg, cands = analyzed("adsdroid")
    t = Trace(PENDING, "SearchPanel.searchByPartName", ("SearchPanel.searchByPartName", 1),
              ["SearchByPartName.preExecute"], [], {"SearchByPartName.preExecute"})
    update_trace(t, app)
    assert t.conditions == [] and t.state == TERMINATED
    assert t.chain[-1] == "SearchPanel.searchByPartName"


def test_fan_in_capped():
    app, cg, cands = analyzed("fanin")
    traces = generate_traces(cg, cands[0])
    assert len(traces) == 10
    assert all(t.state == TERMINATED and len(t.chain) <= 20 for t in traces)
    # surplus forks dropped in caller order: the first ten handlers survive
    firsts = [t.chain[-1] for t in traces]
    callers = [e.caller for e in callers_of(cg, "Hub.work")]
    assert sorted(firsts, key=app.decl_order) == callers[:10]


def test_trace_json():
    app, cg, cands = analyzed("gisapp")
    (t,) = generate_traces(cg, cands[0])
    d = t.to_json()
    assert d["state"] == "terminated" and d["conditions"][0]["negated"] is True


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**5))
def test_matches_brute_force_when_unbounded(seed):
    app = random_app(seed)
    cg = build_call_graph(app)
    for cand in detect_apes(app, cg):
        assert result_chains(generate_traces(cg, cand, UNBOUNDED)) == oracle_chains(cg, cand)


@settings(max_examples=80, deadline=None)
@given(st.integers(min_value=0, max_value=10**5), st.integers(1, 4), st.integers(1, 6))
def test_bounded_and_acyclic(seed, cnt, length):
    app = random_app(seed)
    cg = build_call_graph(app)
    entry = app.entry_callbacks()
    for cand in detect_apes(app, cg):
        traces = generate_traces(cg, cand, TraceLimits(cnt, length))
        assert 1 <= len(traces) <= cnt
        for t in traces:
            assert t.state in (TERMINATED, FAILED)
            assert len(t.chain) <= length
            assert len(set(t.chain)) == len(t.chain)
            if t.state == TERMINATED:
                assert t.chain[-1] in entry


@settings(max_examples=60, deadline=None)
@given(st.integers(min_value=0, max_value=10**5))
def test_fork_count(seed):
    """Traces = 1 + sum over backtrack steps of (callers - 1), when uncapped."""
    app = random_app(seed)
    cg = build_call_graph(app)
    for cand in detect_apes(app, cg):
        forks = 0

        def walk(chain):
            nonlocal forks
            m = chain[-1]
            if len(chain) > 1 and m in app.entry_callbacks():
                return
            callers = [e.caller for e in callers_of(cg, m) if e.caller not in chain]
            forks += max(len(callers) - 1, 0)
            for c in callers:
                walk(chain + [c])

        walk([cand.methodAccessUI])
        assert len(generate_traces(cg, cand, UNBOUNDED)) == 1 + forks
