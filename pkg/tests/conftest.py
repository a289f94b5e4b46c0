import pytest

_KEY = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one clause of an acceptance criterion: ``acceptance(number, clause, ok, detail)``."""
    table = request.config.stash.setdefault(_KEY, {})

    def record(number, clause, ok, detail=""):
        table.setdefault(number, []).append((clause, bool(ok), detail))
        line = f"{'PASS' if ok else 'FAIL'} criterion {number} [{clause}] {detail}".rstrip()
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    table = config.stash.get(_KEY, None)
    if not table:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(table):
        clauses = table[number]
        failed = [c for c, ok, _ in clauses if not ok]
        status = "FAIL" if failed else "PASS"
        tail = f"; failing clauses: {', '.join(failed)}" if failed else ""
        terminalreporter.write_line(
            f"{status} criterion {number}: {len(clauses) - len(failed)}/{len(clauses)} clauses hold{tail}")
        for clause, ok, detail in clauses:
            terminalreporter.write_line(f"    {'ok  ' if ok else 'FAIL'} {clause}: {detail}".rstrip())
