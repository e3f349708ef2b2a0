import numpy as np
import pytest
from scipy import signal


def fractional_noise(n, d, seed, burn=4000):
    """ARFIMA(0, d, 0) draw via the MA weights of (1 - L)^{-d}, built by recursion."""
    rng = np.random.default_rng(seed)
    total = n + burn
    k = np.arange(1, total)
    psi = np.concatenate(([1.0], np.cumprod((k - 1 + d) / k)))
    e = rng.standard_normal(total)
    return signal.fftconvolve(e, psi)[:total][burn:]


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one pass/fail line; lines are echoed in the terminal summary."""

    def record(name, ok, detail):
        line = f"{'PASS' if ok else 'FAIL'}  {name}: {detail}"
        _CRITERIA.append(line)
        print(line)
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
