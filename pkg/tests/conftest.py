import time

import pytest


@pytest.fixture
def criterion(request):
    """Record named checks for one acceptance criterion and fail if any is false."""
    lines = request.config.__dict__.setdefault("_acceptance", [])
    start = time.perf_counter()

    def report(number, title, checks, limit=None):
        elapsed = time.perf_counter() - start
        failed = [name for name, ok in checks.items() if not ok]
        if limit is not None and elapsed > limit:
            failed.append(f"runtime {elapsed:.1f}s > {limit}s")
        status = "PASS" if not failed else "FAIL"
        line = f"[{status}] criterion {number:2d}: {title} ({elapsed:.2f}s)"
        if failed:
            line += " -- failed: " + "; ".join(failed)
        lines.append((number, line))
        print(line)
        assert not failed, line

    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = getattr(config, "_acceptance", None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for _, line in sorted(lines):
        terminalreporter.write_line(line)
