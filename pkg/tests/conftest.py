import pytest

from wgderham.geometry import reference_tetrahedron, triangular_prism, unit_cube


@pytest.fixture(scope="session")
def tet():
    return reference_tetrahedron()


@pytest.fixture(scope="session")
def cube():
    return unit_cube()


@pytest.fixture(scope="session")
def prism():
    return triangular_prism()


@pytest.fixture(scope="session")
def elements(tet, cube, prism):
    return {"tet": tet, "cube": cube, "prism": prism}
