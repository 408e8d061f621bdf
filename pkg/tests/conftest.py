import numpy as np
import pytest

from rmatld.geometry import DualPoint, ProjPoint
from rmatld.model import MatrixModel
from rmatld.rate import build_rate
from rmatld.spectral import solve_spectral

FIB2 = {
    "dimension": 2,
    "generators": [[[2.0, 1.0], [1.0, 1.0]], [[1.0, 1.0], [1.0, 2.0]]],
    "weights": [0.5, 0.5],
}


@pytest.fixture(scope="session")
def fib2():
    return MatrixModel.from_dict(FIB2)


@pytest.fixture(scope="session")
def similarity():
    def rot(a):
        return np.array([[np.cos(a), -np.sin(a)], [np.sin(a), np.cos(a)]])

    return MatrixModel(dimension=2,
                       generators=np.array([2.0 * rot(0.9), 0.5 * rot(2.31)]),
                       weights=np.array([0.5, 0.5]))


@pytest.fixture(scope="session")
def solves(fib2):
    """Moderate-resolution spectral solves shared across unit tests."""
    return {s: solve_spectral(fib2, s, N=256) for s in (-0.2, 0.0, 0.5, 1.0)}


@pytest.fixture(scope="session")
def rate(fib2):
    return build_rate(fib2, -0.45, 1.8, 0.025, N=256)


@pytest.fixture(scope="session")
def x0():
    return ProjPoint.from_angle(0.7)


@pytest.fixture(scope="session")
def f():
    return DualPoint.from_angle(0.3)
