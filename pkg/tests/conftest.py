from pathlib import Path

import pytest

from qualmetrics.frontend import load_model

F1_DIR = Path(__file__).parent / "fixtures" / "f1"


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): an acceptance criterion")
    config._acceptance = {}


def pytest_runtest_logreport(report):
    item_marker = getattr(report, "criterion", None)
    if item_marker is None:
        return
    results = report.config_acceptance
    if report.when == "call" or report.outcome != "passed":
        prev = results.get(item_marker, True)
        results[item_marker] = prev and report.outcome == "passed"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is not None:
        rep.criterion = marker.args
        rep.config_acceptance = item.config._acceptance


def pytest_terminal_summary(terminalreporter, config):
    results = getattr(config, "_acceptance", {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, label), ok in sorted(results.items()):
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {number:>2}: {label}")


@pytest.fixture(scope="session")
def f1_dir():
    return F1_DIR


@pytest.fixture(scope="session")
def f1_model():
    return load_model([F1_DIR / "src"])
