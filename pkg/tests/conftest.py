import pytest

from csfqlab.config import load_config
from csfqlab.constants import fF, uA
from csfqlab.model import DeviceParams

ACCEPTANCE_RESULTS = []


@pytest.fixture(scope="session")
def default_cfg():
    return load_config()


@pytest.fixture(scope="session")
def device(default_cfg):
    return default_cfg.to_params()


@pytest.fixture
def published_params():
    """Published (I0, alpha, Cs) with an arbitrary in-range Cj."""
    return DeviceParams(0.3 * uA, 0.41, 93 * fF, 10 * fF)


@pytest.fixture
def criterion(request):
    """Record one acceptance line: call with (ok, detail) before asserting."""
    name = request.node.name

    def record(ok, detail):
        ACCEPTANCE_RESULTS.append((name, bool(ok), detail))
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name, ok, detail in ACCEPTANCE_RESULTS:
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}: {detail}")
