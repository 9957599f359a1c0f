import pytest


def pytest_configure(config):
    config.addinivalue_line("markers", "acceptance: one numbered acceptance criterion")
    config._criterion_lines = []


@pytest.fixture
def report_criterion(request):
    """Collects ``(label, ok, detail)`` checks for one criterion; the summary line is
    printed at the end of the session and the test fails if any check failed."""
    checks = []
    yield checks
    name = request.node.get_closest_marker("acceptance").args[0]
    call = getattr(request.node, "rep_call", None)
    crashed = call is None or (call.failed and not any(not c[1] for c in checks))
    ok = bool(checks) and all(c[1] for c in checks) and not crashed
    if crashed:
        checks.append(("error", False, "test raised before finishing"))
    detail = "; ".join(f"{label}: {d} [{'ok' if good else 'FAIL'}]" for label, good, d in checks)
    request.config._criterion_lines.append((name, f"{'PASS' if ok else 'FAIL'}  criterion "
                                                  f"{name}: {detail}"))


def pytest_terminal_summary(terminalreporter, config):
    lines = sorted(getattr(config, "_criterion_lines", []), key=lambda x: int(x[0]))
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in lines:
            terminalreporter.write_line(line)


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    if rep.when == "call":
        item.rep_call = rep
