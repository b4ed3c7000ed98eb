import time

import numpy as np
import pytest

from quantgrad import kernels
from quantgrad.sim import apply_gate, new_state

_SESSION = {}
ACCEPTANCE_LINES: list[str] = []


def pytest_sessionstart(session):
    _SESSION["start"] = time.perf_counter()


def pytest_terminal_summary(terminalreporter):
    elapsed = time.perf_counter() - _SESSION.get("start", time.perf_counter())
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
    terminalreporter.write_line(f"kernel backend: {kernels.BACKEND}; session wall time {elapsed:.1f} s")


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    # compile (or load cached) numba kernels once so timings exclude JIT
    s = new_state(3)
    for g, t in [("H", 0), ("X", 1), ("Z", 2), ("CNOT", (0, 1)), ("TOFFOLI", (0, 1, 2)), ("SWAP", (0, 2))]:
        apply_gate(s, g, t)
    apply_gate(s, "RY", 0, 0.3)
    apply_gate(s, "CPHASE", (0, 1), 0.3)
    kernels.apply_phases(s.amplitudes, np.zeros(8))
    yield


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def random_state(rng, q):
    v = rng.normal(size=1 << q) + 1j * rng.normal(size=1 << q)
    return v / np.linalg.norm(v)
