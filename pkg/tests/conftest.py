import time
from contextlib import contextmanager

import pytest

_RESULTS: dict[int, tuple[str, str, float]] = {}


@contextmanager
def _record(number: int, title: str, limit_s: float):
    start = time.perf_counter()
    try:
        yield
    except BaseException:
        _RESULTS[number] = ("FAIL", title, time.perf_counter() - start)
        raise
    elapsed = time.perf_counter() - start
    if elapsed >= limit_s:
        _RESULTS[number] = ("FAIL", f"{title} (took {elapsed:.1f} s, limit {limit_s:g} s)", elapsed)
        pytest.fail(f"criterion {number} exceeded its {limit_s:g} s runtime limit: {elapsed:.1f} s")
    _RESULTS[number] = ("PASS", title, elapsed)


@pytest.fixture
def criterion():
    """Time a block against a runtime limit and record PASS/FAIL for the summary."""
    return _record


def pytest_terminal_summary(terminalreporter):
    if not _RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_RESULTS):
        status, title, elapsed = _RESULTS[number]
        terminalreporter.write_line(f"{status} criterion {number:2d}: {title} [{elapsed:.2f} s]")
