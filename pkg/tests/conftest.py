import numpy as np
import pytest

from kdrecon.core import QuantumState


@pytest.fixture
def ket0():
    return QuantumState([1, 0])


@pytest.fixture
def plus_x():
    return QuantumState.normalized([1, 1])


@pytest.fixture
def plus_y():
    return QuantumState.normalized([1, 1j])


def maxabs(a):
    return float(np.max(np.abs(np.asarray(a))))
