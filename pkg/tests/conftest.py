"""Prints one PASS/FAIL line per acceptance criterion after the test session."""

_RESULTS = {}


def _failure_message(report) -> str:
    crash = getattr(report.longrepr, "reprcrash", None)
    return crash.message.splitlines()[0] if crash else str(report.longrepr).splitlines()[-1]


def pytest_runtest_logreport(report):
    props = dict(report.user_properties)
    name = props.get("criterion")
    if name is None or not (report.when == "call" or report.failed):
        return
    if report.passed:
        _RESULTS[name] = ("PASS", props.get("detail", ""))
    else:
        _RESULTS[name] = ("FAIL", _failure_message(report))


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(_RESULTS, key=lambda n: int(n.split()[0][1:])):
        status, detail = _RESULTS[name]
        terminalreporter.write_line(f"{status} {name}: {detail}")
