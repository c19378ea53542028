import numpy as np
import pytest

from mulspace import make_grid


@pytest.fixture(scope="session")
def grid1():
    return make_grid(1, 4096, 64 * np.pi)


@pytest.fixture(scope="session")
def small1():
    return make_grid(1, 256, 8 * np.pi)


@pytest.fixture(scope="session")
def small2():
    return make_grid(2, 64, 4 * np.pi)


def rel(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


@pytest.fixture
def criterion(request):
    """Record one acceptance line; call with (label, passed, detail) then assert."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def record(label, passed, detail=""):
        lines.append(f"{'PASS' if passed else 'FAIL'}  {label}  {detail}".rstrip())
        return passed

    return record


_ACCEPTANCE = pytest.StashKey()


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
