import numpy as np
import pytest

from irs_discrete.model import ChannelRealization


def random_channel(rng, M, N, hd_scale=1.0):
    """Unit-scale complex Gaussian channel draw for solver-level tests."""
    def cn(*shape):
        return (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / np.sqrt(2)
    return ChannelRealization(hd_scale * cn(M), cn(N), cn(N, M))


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


# acceptance summary: one line per criterion, printed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
