import pytest

from blowup_lab import compute_well, make_grid


@pytest.fixture(scope="session")
def grid257():
    return make_grid(1.0, 257)


@pytest.fixture(scope="session")
def grid129():
    return make_grid(1.0, 129)


@pytest.fixture(scope="session")
def grid65():
    return make_grid(1.0, 65)


@pytest.fixture(scope="session")
def wells257(grid257):
    """Well constants on the unit interval at N=257 for the exponents the
    suite exercises."""
    return {p: compute_well(grid257, p) for p in (3.0, 4.0, 6.0)}


@pytest.fixture(scope="session")
def well4(wells257):
    return wells257[4.0]
