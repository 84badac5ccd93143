import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from quadham.hamparse import GammaMatrix  # noqa: E402


def random_hermitian_gamma(rng, K, scale=1.0):
    """Random Hermitian gamma with a real scalar part."""
    n = 2 * K
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    g = scale * (a + a.conj().T) / 2
    return GammaMatrix(K, g, complex(rng.normal()))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
