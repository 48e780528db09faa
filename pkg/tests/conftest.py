import re

_CRITERION = re.compile(r"test_acceptance\.py::test_criterion_(\d+)_(\w+)")
_results = {}


def pytest_runtest_logreport(report):
    m = _CRITERION.search(report.nodeid)
    if not m:
        return
    key = (int(m.group(1)), m.group(2))
    # a failure in any phase (setup, call, teardown) fails the criterion
    if report.failed:
        _results[key] = "FAIL"
    elif report.when == "call" and key not in _results:
        _results[key] = "PASS"


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    terminalreporter.section("acceptance criteria")
    for (number, name), status in sorted(_results.items()):
        terminalreporter.write_line(f"criterion {number}: {status} ({name.replace('_', ' ')})")
