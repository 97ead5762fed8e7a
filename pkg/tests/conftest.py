import pytest

from brieskorn.ke import PairMode
from brieskorn.search import Search

_criteria: list[tuple[str, str, str]] = []


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(label, text): acceptance criterion")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        label, text = marker.args
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIP"}[report.outcome]
        _criteria.append((label, text, verdict))


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    terminalreporter.section("acceptance criteria")
    for label, text, verdict in _criteria:
        terminalreporter.write_line(f"[{verdict}] {label:<4} {text}")


def _run(dim, mode):
    search = Search(dim, mode, jobs=1)
    records = list(search.records())
    return search, records


@pytest.fixture(scope="session")
def dim5():
    return _run(5, PairMode.INCLUDE_DIAGONAL)


@pytest.fixture(scope="session")
def dim7():
    return _run(7, PairMode.INCLUDE_DIAGONAL)
