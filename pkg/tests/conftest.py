import pytest

CRITERIA = {
    1: "approximation theory",
    2: "r-function identity",
    3: "QSP/QET/QSVT correctness",
    4: "block-encoding round trips",
    5: "ROAA algebra",
    6: "algorithms vs oracle",
    7: "Heisenberg TI reproduction",
    8: "Heisenberg TD reproduction",
    9: "H2 reproduction",
    10: "complexity calculators",
    11: "determinism",
}

_results = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(n): acceptance criterion covered by the test")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    n = marker.args[0]
    if report.when == "call" or (report.when == "setup" and report.outcome != "passed"):
        ok = report.outcome == "passed"
        entry = _results.setdefault(n, {"passed": 0, "failed": []})
        if ok:
            entry["passed"] += 1
        else:
            entry["failed"].append(item.name)


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(CRITERIA):
        if n not in _results:
            terminalreporter.write_line(f"criterion {n:2d} ({CRITERIA[n]}): NOT RUN")
            continue
        entry = _results[n]
        if entry["failed"]:
            terminalreporter.write_line(f"criterion {n:2d} ({CRITERIA[n]}): FAIL [{', '.join(entry['failed'])}]")
        else:
            terminalreporter.write_line(f"criterion {n:2d} ({CRITERIA[n]}): PASS ({entry['passed']} checks)")
