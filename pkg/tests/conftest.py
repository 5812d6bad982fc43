import hypothesis
import numpy as np
import pytest

from oscnet.integrate import find_limit_cycle
from oscnet.models import VdpParams

np.seterr(over="raise", invalid="raise", divide="raise", under="ignore")

hypothesis.settings.register_profile("default", max_examples=60, deadline=None)
hypothesis.settings.register_profile("fast", max_examples=10, deadline=None)
hypothesis.settings.load_profile("default")

# criterion label -> (passed, detail), filled in by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict = {}


@pytest.fixture(scope="session")
def vdp():
    return VdpParams(1.0)


@pytest.fixture(scope="session")
def orbit(vdp):
    """Van der Pol mu=1 limit cycle at dt=1e-3."""
    return find_limit_cycle(vdp, dt=1e-3)


@pytest.fixture(scope="session")
def orbit_fine(vdp):
    """Van der Pol mu=1 limit cycle at dt=1e-4."""
    return find_limit_cycle(vdp, dt=1e-4)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(ACCEPTANCE_RESULTS, key=lambda s: (int(s.split()[0].rstrip("abcd")), s)):
        ok, detail = ACCEPTANCE_RESULTS[label]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {label}: {detail}")
