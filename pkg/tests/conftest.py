import numpy as np
import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@pytest.fixture
def rng():
    from trajgrowth.distributions import make_rng
    return make_rng(12345, 0)


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def verdict():
    """Record one acceptance line, print it, then assert on it."""
    def record(label: str, ok: bool, detail: str):
        line = f"{'PASS' if ok else 'FAIL'}  {label}: {detail}"
        _ACCEPTANCE_LINES.append(line)
        print(line)
        assert ok, line
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
