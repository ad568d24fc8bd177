import math

import numpy as np
import pytest

from qbounds.scenarios import RotationsConfig, rotations_problem

ACCEPTANCE_LINES = []

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)


@pytest.fixture
def rotated_half():
    """Rotated qubit at r = 1/2, theta = phi = pi/4."""
    return rotations_problem(RotationsConfig(0.5, math.pi / 4, math.pi / 4))


@pytest.fixture
def rotated_pure():
    return rotations_problem(RotationsConfig(1.0, math.pi / 4, math.pi / 4))


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion")[1].split()[0])):
            terminalreporter.write_line(line)
