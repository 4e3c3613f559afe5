import pytest

_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one summary line per acceptance criterion and assert it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(number: int, title: str, checks: list[tuple[str, bool, str]]):
        bad = [c for c in checks if not c[1]]
        status = "PASS" if not bad else "FAIL"
        line = f"criterion {number} {status}: {title} ({len(checks) - len(bad)}/{len(checks)} checks)"
        if bad:
            shown = "; ".join(f"{name} [{detail}]" for name, _, detail in bad[:4])
            more = f"; ... {len(bad) - 4} more" if len(bad) > 4 else ""
            line += "; failing: " + shown + more
        lines.append((number, line))
        print(line)
        assert not bad, line

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for _, line in sorted(lines):
            terminalreporter.write_line(line)
