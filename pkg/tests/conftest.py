import numpy as np
import pytest

from qstab import SubspaceBasis, seven_level, toy3

TOY_GAMMAS = (0.5, 0.3, 0.2)
SEVEN_GAMMAS = (0.3, 0.3, 0.05, 0.15, 0.2)


@pytest.fixture(scope="session")
def toy():
    kmap, _ = toy3(TOY_GAMMAS)
    return kmap


@pytest.fixture(scope="session")
def seven():
    kmap, _ = seven_level(SEVEN_GAMMAS)
    return kmap


@pytest.fixture(scope="session")
def toy_plus():
    """span{(e1+e2)/sqrt(2)}: the invariant pure state of the toy model."""
    v = np.zeros((3, 1), dtype=complex)
    v[0, 0] = v[1, 0] = 2**-0.5
    return SubspaceBasis(v)


@pytest.fixture(scope="session")
def toy_minus():
    v = np.zeros((3, 1), dtype=complex)
    v[0, 0] = 2**-0.5
    v[1, 0] = -(2**-0.5)
    return SubspaceBasis(v)


@pytest.fixture(scope="session")
def seven_13():
    return SubspaceBasis.from_indices(7, [0, 2])


@pytest.fixture(scope="session")
def seven_24():
    return SubspaceBasis.from_indices(7, [1, 3])


@pytest.fixture(scope="session")
def seven_1234():
    return SubspaceBasis.from_indices(7, range(4))
