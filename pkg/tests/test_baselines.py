import statistics

import pytest
from hypothesis import given, settings, strategies as st

from apecheck import Environment, UiEvent, parse_app
from apecheck.baselines import (
    BACKEND, MalformedLog, build_hb_graph, collect_logs, detect_races, detect_races_in, fuzz,
    race_sites,
)
from apecheck.baselines import _hbkernel_py
from apecheck.baselines.hbkernel import reach_batch
from apecheck.corpus import event_alphabet
from apecheck.sim import run
from apecheck.verifier import synthesized_tests

from conftest import COMPLIANT, load

L = UiEvent("launch")

try:
    from apecheck.baselines import _hbkernel as _compiled
except ImportError:  # extension not built
    _compiled = None

IMPLS = [_hbkernel_py] + ([_compiled] if _compiled else [])


# --- fuzzer -----------------------------------------------------------------------------

def test_fuzz_deterministic():
    app = load("adsdroid")
    assert fuzz(app, 500, 7).to_json() == fuzz(app, 500, 7).to_json()
    assert fuzz(app, 500, 7).to_json() != fuzz(app, 500, 8).to_json()


def test_fuzz_zero_budget():
    r = fuzz(load("adsdroid"), 0, 0)
    assert r.crashes == [] and r.eventsUsed == 0
    with pytest.raises(ValueError):
        fuzz(load("adsdroid"), -1, 0)


@pytest.mark.parametrize("name", COMPLIANT)
def test_fuzz_compliant_never_crashes(name):
    assert fuzz(load(name), 10_000, 3).crashes == []


def test_fuzz_pedometer_first_event():
    r = fuzz(load("pedometer"), 100, 0)
    assert [(c.report.exception, c.eventsToFirst) for c in r.crashes] == [
        ("IllegalStateException", 1)]


def test_fuzz_adsdroid_needs_many_events():
    firsts = []
    for seed in range(10):
        r = fuzz(load("adsdroid"), 10_000, seed)
        bad = [c.eventsToFirst for c in r.crashes if c.report.exception == "BadTokenException"]
        assert bad
        firsts.append(min(bad))
        assert all(c.eventsToFirst <= r.eventBudget for c in r.crashes)
    assert statistics.mean(firsts) > 4 * 4  # well beyond the 4-event verifier sequences


def test_fuzz_json_fields():
    d = fuzz(load("pedometer"), 10, 1).to_json()
    assert d["eventBudget"] == 10 and d["seed"] == 1
    assert d["crashes"][0]["eventsToFirst"] == 1


# --- happens-before races ----------------------------------------------------------------

SINGLE = """app Solo
entry Main
bind b Main.onB click code
activity Main
  gui label view
  lifecycle onCreate
    access view.setText label
  end
  handler onB
    access view.setText label
  end
end
"""

TWO = """app Two
entry Main
bind b Main.onB click code
activity Main
  gui first view
  gui second view
  lifecycle onCreate
  end
  handler onB
    start A
    start B
  end
end
async A task owner Main
  callback background
  end
  callback postExecute
    post
      access view.setText first
    end
  end
end
async B task owner Main
  callback background
  end
  callback postExecute
    post
      access view.setText second
    end
  end
end
"""


def test_adsdroid_exhaustive_races():
    app = load("adsdroid")
    logs = collect_logs(app, synthesized_tests(app))
    assert race_sites(detect_races_in(logs)) == {
        ("SearchByPartName.postExecute", 0), ("DownloadDatasheet.postExecute", 0)}
    for r in detect_races_in(logs):
        assert not r.hbRelated and "w" in (r.accessA.rw, r.accessB.rw)


def test_adsdroid_eager_no_races():
    app = load("adsdroid")
    assert detect_races_in(collect_logs(app, synthesized_tests(app), "eager")) == []


def test_single_threaded_no_races():
    app = parse_app(SINGLE)
    res = run(app, [L, UiEvent("click", "b"), UiEvent("click", "b"), UiEvent("rotate")],
              record=True)
    assert detect_races(res.hb) == []


def test_two_independent_asyncs_no_races():
    app = parse_app(TWO)
    logs = collect_logs(app, [((L, UiEvent("click", "b")), Environment())])
    assert len(logs) > 1
    assert detect_races_in(logs) == []


@pytest.mark.parametrize("name", COMPLIANT)
def test_eager_compliant_logs_race_free(name):
    app = load(name)
    tests = [((L, e, UiEvent("rotate")), Environment()) for e in event_alphabet(app)
             if e.kind != "back"]
    assert detect_races_in(collect_logs(app, tests, "eager")) == []


def test_fuzz_logs_cover_less_on_average():
    """Race reports depend on which executions were logged."""
    app = load("adsdroid")
    full = race_sites(detect_races_in(collect_logs(app, synthesized_tests(app))))
    counts = []
    for seed in range(20):
        logs = []
        fuzz(app, 100, seed, record=True, logs=logs)
        sites = race_sites(detect_races_in(logs))
        assert sites <= full
        counts.append(len(sites))
    assert statistics.mean(counts) < len(full)


@pytest.mark.parametrize("log", [
    [("bogus",)],
    [("acc", 1, "ui", "m", 0, "x", "w")],
    [("begin", 0, "ui"), ("resume", 1, 0, 99)],
    ["not a tuple"],
    [("post", 1)],
])
def test_malformed_logs(log):
    with pytest.raises(MalformedLog):
        detect_races(log)


def test_graph_edges_follow_execution_order():
    app = load("adsdroid")
    for log in collect_logs(app, synthesized_tests(app)):
        g = build_hb_graph(log)
        for u in range(g.n_nodes):
            assert all(v > u for v in g.indices[g.indptr[u]:g.indptr[u + 1]])


# --- reachability kernels ----------------------------------------------------------------

def closure(n, edges):
    reach = [set() for _ in range(n)]
    for u in reversed(range(n)):
        for v in edges[u]:
            reach[u] |= {v} | reach[v]
    return reach


@st.composite
def dags(draw):
    n = draw(st.integers(1, 40))
    edges = [sorted(set(draw(st.lists(st.integers(u + 1, n - 1), max_size=4)))) if u < n - 1
             else [] for u in range(n)]
    pairs = draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=60))
    return n, edges, sorted(pairs)


@settings(max_examples=200, deadline=None)
@given(dags())
def test_kernels_match_closure(case):
    n, edges, pairs = case
    indptr, indices = [0], []
    for row in edges:
        indices += row
        indptr.append(len(indices))
    src = [a for a, _ in pairs]
    dst = [b for _, b in pairs]
    reach = closure(n, edges)
    want = [int(a == b or b in reach[a]) for a, b in pairs]  # reflexive
    for impl in IMPLS:
        assert reach_batch(indptr, indices, src, dst, impl) == want


def test_backend_reported():
    assert BACKEND in ("compiled", "python")


@pytest.mark.skipif(_compiled is None, reason="compiled kernel not built")
def test_backends_agree_on_fuzz_logs():
    logs = []
    fuzz(load("compliant"), 2_000, 0, record=True, logs=logs)
    for log in logs[:20]:
        a = detect_races(log, _hbkernel_py)
        b = detect_races(log, _compiled)
        assert a == b


def test_pure_switch_selects_fallback():
    import os
    import subprocess
    import sys
    env = dict(os.environ, APECHECK_PURE="1")
    out = subprocess.run([sys.executable, "-c",
                          "from apecheck.baselines import BACKEND; print(BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"
