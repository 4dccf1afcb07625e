import numpy as np
import pytest

from bcnoma.model import OrderedChannel, SystemParams


@pytest.fixture
def hand():
    """x=2, y=0.5, z=1 with unit noise and unit thresholds."""
    return OrderedChannel.direct(2.0, 0.5, 1.0)


@pytest.fixture
def params():
    return SystemParams()


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """record(criterion, ok, detail): one line per acceptance criterion."""
    results = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, ok, detail):
        results[number] = (ok, detail)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
        return ok

    return record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    results = config.stash.get(_ACCEPTANCE, {})
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(results):
        ok, detail = results[number]
        terminalreporter.write_line(f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})")
