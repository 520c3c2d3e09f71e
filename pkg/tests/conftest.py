import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance(request):
    """Record one pass/fail line per acceptance criterion."""
    entry = {"name": request.node.name, "detail": ""}

    def record(label, ok, detail=""):
        entry.update(label=label, ok=ok, detail=detail)

    yield record
    if "label" in entry:
        failed = getattr(request.node, "rep_call", None)
        ok = entry["ok"] and not (failed is not None and failed.failed)
        ACCEPTANCE_LINES.append(f"[{'PASS' if ok else 'FAIL'}] {entry['label']}: {entry['detail']}")


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    rep = outcome.get_result()
    setattr(item, f"rep_{rep.when}", rep)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
