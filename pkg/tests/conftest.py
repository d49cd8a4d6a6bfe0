import pytest

from qperiods.hypersurface import Hypersurface
from qperiods.parse import parse_hamiltonian
from qperiods.trace_series import TraceSeries

CUBIC = "1/2*p1^2 + x1^2 + x1^3"
QUARTIC = "1/2*p1^2 + x1^2 + x1^4"
HARMONIC_1 = "1/2*p1^2 + 1/2*x1^2"
HARMONIC_2 = "1/2*p1^2 + 1/2*p2^2 + 1/2*x1^2 + 1/2*x2^2"

ACCEPTANCE: dict = {}


@pytest.fixture(scope="session")
def cubic_H():
    return parse_hamiltonian(CUBIC)


@pytest.fixture(scope="session")
def cubic(cubic_H):
    return Hypersurface.from_hamiltonian(cubic_H)


@pytest.fixture(scope="session")
def cubic_series(cubic_H, cubic):
    # shared so sigma(g1), sigma(g2) are built once per session
    return TraceSeries(cubic_H, cubic)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, title = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {title}")
