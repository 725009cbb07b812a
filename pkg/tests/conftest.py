import pytest

from bibdkit import GeometryParams, from_affine_geometry, from_block_list

# the classic 7-point, 7-line plane as an explicit block list
FANO_BLOCKS = [
    (0, 1, 2),
    (0, 3, 4),
    (0, 5, 6),
    (1, 3, 5),
    (1, 4, 6),
    (2, 3, 6),
    (2, 4, 5),
]


@pytest.fixture(scope="session")
def fano():
    return from_block_list(7, FANO_BLOCKS)


@pytest.fixture(scope="session")
def ag22():
    return from_affine_geometry(GeometryParams(q=2, n=2, m=1))


@pytest.fixture(scope="session")
def ag23():
    return from_affine_geometry(GeometryParams(q=3, n=2, m=1))


@pytest.fixture(scope="session")
def ag32_m1():
    return from_affine_geometry(GeometryParams(q=2, n=3, m=1))


@pytest.fixture(scope="session")
def ag32_m2():
    return from_affine_geometry(GeometryParams(q=2, n=3, m=2))
