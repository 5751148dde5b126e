import numpy as np
import pytest

from semiactive.params import BoucWenParams, SuspensionParams


@pytest.fixture
def susp():
    return SuspensionParams()


@pytest.fixture
def bw():
    return BoucWenParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_verdicts = pytest.StashKey[dict]()
N_CRITERIA = 10


@pytest.fixture
def verdict(request):
    """Record a PASS/FAIL line for an acceptance criterion, then assert it."""
    lines = request.config.stash.setdefault(_verdicts, {})

    def record(n, title, ok, detail=""):
        tail = f"  [{detail}]" if detail else ""
        lines[n] = f"criterion {n:>2}: {'PASS' if ok else 'FAIL'}  {title}{tail}"
        assert ok, lines[n]

    return record


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_verdicts, None)
    if not lines:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, N_CRITERIA + 1):
        terminalreporter.write_line(lines.get(n, f"criterion {n:>2}: NOT RUN  (deselected or errored before a verdict)"))
