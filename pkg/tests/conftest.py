import numpy as np
import pytest

from seqtomo.instrument import PAULI_X, PAULI_Y, PAULI_Z

I2 = np.eye(2, dtype=complex)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pauli_combo(c0, cx, cy, cz):
    return c0 * I2 + cx * PAULI_X + cy * PAULI_Y + cz * PAULI_Z
