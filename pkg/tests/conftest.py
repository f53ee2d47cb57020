import pytest

from pg4q.gf import GF
from pg4q.pg import Geometry


@pytest.fixture(scope="session")
def geom2():
    return Geometry(GF(1))


@pytest.fixture(scope="session")
def geom4():
    return Geometry(GF(2))


@pytest.fixture(scope="session")
def geom8():
    return Geometry(GF(3))


@pytest.fixture(scope="session")
def geoms(geom2, geom4, geom8):
    return {2: geom2, 4: geom4, 8: geom8}
