import pytest

from riemann_awr import RiemannSetup


@pytest.fixture
def delta_setup():
    """Region III data with w0 = 6, v_delta = 2."""
    return RiemannSetup.from_values(2.0, 4.0, 1.0, 0.0, 1.0, 2.0)


@pytest.fixture
def contact_setup():
    """Region I data with rho* = 0.5, v* = 3."""
    return RiemannSetup.from_values(1.0, 2.0, 1.0, 3.0, 1.0, 0.0)


@pytest.fixture
def equal_density_setup():
    return RiemannSetup.from_values(1.0, 3.0, 1.0, 0.0, 1.0, 0.0)
