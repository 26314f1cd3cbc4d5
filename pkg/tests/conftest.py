import importlib.resources

import pytest

from apecheck import build_call_graph, detect_apes, load_app

FIXTURES = importlib.resources.files("apecheck") / "fixtures"

COMPLIANT = ["compliant", "sync_settings", "adsdroid_guarded", "pedometer_posted", "gisapp_posted"]


def fixture_path(name: str):
    return FIXTURES / f"{name}.ape"


def load(name: str):
    return load_app(fixture_path(name))


def analyzed(name: str):
    app = load(name)
    cg = build_call_graph(app)
    return app, cg, detect_apes(app, cg)


@pytest.fixture
def adsdroid():
    return analyzed("adsdroid")


# one line per acceptance criterion, printed after the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
