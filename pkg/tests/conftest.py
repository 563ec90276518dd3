import pytest

_RESULTS = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    ident, description = marker.args
    if rep.when == "call" or (rep.when == "setup" and not rep.passed):
        prev = _RESULTS.get(ident, (description, True))
        _RESULTS[ident] = (description, prev[1] and rep.passed)


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for ident in sorted(_RESULTS, key=lambda s: int(s.lstrip("AC"))):
        description, ok = _RESULTS[ident]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {ident:5s} {description}")
