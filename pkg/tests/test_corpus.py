from hypothesis import given, settings, strategies as st

from apecheck import format_app, validate_app
from apecheck.corpus import (
    MAX_ASYNCS, MAX_METHODS, candidate_environments, oracle_crash_sites, random_app,
    random_app_source, random_corpus,
)
from apecheck.model import EnvCondition, InputConstraint

from conftest import load


@settings(max_examples=100, deadline=None)
@given(st.integers(min_value=0, max_value=10**6))
def test_random_apps_valid_and_small(seed):
    app = random_app(seed)
    assert validate_app(app) == []
    assert len(app.methods) <= MAX_METHODS
    assert 1 <= len(app.asyncs) <= MAX_ASYNCS


def test_deterministic():
    assert random_app_source(5) == random_app_source(5)
    a = [format_app(x) for x in random_corpus(5, seed=1)]
    b = [format_app(x) for x in random_corpus(5, seed=1)]
    assert a == b


def test_oracle_finds_fixture_sites():
    assert oracle_crash_sites(load("adsdroid")) == {
        ("SearchByPartName.postExecute", 0), ("DownloadDatasheet.postExecute", 0)}
    assert oracle_crash_sites(load("gisapp")) == {("ExportTask.background", 1)}
    assert oracle_crash_sites(load("compliant"), depth=2) == set()


def test_environment_enumeration_covers_each_truth_vector():
    envs = candidate_environments(load("envgate"))
    conds = [
        EnvCondition("wifi-enabled"), EnvCondition("permission-granted", arg="camera"),
        EnvCondition("input-matches", arg="address",
                     constraint=InputConstraint("format", "email")),
    ]
    vectors = {tuple(e.holds(c) for c in conds) for e in envs}
    assert len(vectors) == 8
