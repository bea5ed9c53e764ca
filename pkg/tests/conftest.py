import os
import sys

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile("qes", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("qes")

sys.path.insert(0, os.path.dirname(__file__))

_LINES: list[str] = []


@pytest.fixture
def criterion():
    """Record one PASS/FAIL line per acceptance criterion and return the verdict."""
    def record(label: str, ok: bool, detail: str = "") -> bool:
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'}" + (f"  {detail}" if detail else "")
        _LINES.append(line)
        print(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _LINES:
        terminalreporter.section("acceptance criteria")
        for line in _LINES:
            terminalreporter.write_line(line)
