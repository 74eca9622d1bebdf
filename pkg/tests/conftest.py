import pytest
from hypothesis import HealthCheck, settings

from wienerzp.zp_core import PrimeContext

settings.register_profile("default", max_examples=60, deadline=None,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

SMALL_PRIMES = (3, 5, 7, 11, 13, 17, 19, 23, 29, 31)

_acceptance_lines: list[str] = []


@pytest.fixture
def criterion():
    """Record one pass/fail line per acceptance criterion for the summary."""
    def record(name: str, ok: bool, detail: str = ""):
        _acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


@pytest.fixture
def ctx13():
    return PrimeContext(13)
