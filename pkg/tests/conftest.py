import pytest

from casimir_decomp.dielectric import AU_GAMMA, AU_OMEGA_P, Drude, Plasma
from casimir_decomp.quadrature import QuadratureConfig


@pytest.fixture(scope="session")
def au_drude():
    return Drude(AU_OMEGA_P, AU_GAMMA)


@pytest.fixture(scope="session")
def au_plasma():
    return Plasma(AU_OMEGA_P)


@pytest.fixture(scope="session")
def vacuum():
    return Plasma(0.0)


@pytest.fixture(scope="session")
def cfg():
    return QuadratureConfig()
