import numpy as np
import pytest

from mollifrac import (Box, Domain, bump_kernel, catalog, default_domain,
                       gaussian_kernel, hat_kernel)


@pytest.fixture(scope="session")
def hat1d():
    return hat_kernel()


@pytest.fixture(scope="session")
def hat2d():
    return hat_kernel(dim=2)


@pytest.fixture(scope="session")
def gauss1d():
    return gaussian_kernel()


@pytest.fixture(scope="session")
def gauss2d():
    return gaussian_kernel(dim=2)


@pytest.fixture(scope="session")
def bump1d():
    return bump_kernel()


@pytest.fixture(scope="session")
def step():
    return catalog("step1d_box", height=1.0)


@pytest.fixture(scope="session")
def step_domain(step):
    return default_domain(step)


@pytest.fixture(scope="session")
def halfplane():
    return catalog("halfplane_in_square")


@pytest.fixture(scope="session")
def halfplane_domain(halfplane):
    return default_domain(halfplane)


@pytest.fixture(scope="session")
def pm_step():
    return catalog("two_jumps_1d", a=-1.0, b=1.0)


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
