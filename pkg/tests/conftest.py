import pytest

from factorforge.graph import MultiGraph


@pytest.fixture
def path4():
    return MultiGraph(4, [(0, 1), (1, 2), (2, 3)])


@pytest.fixture
def c4():
    return MultiGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


@pytest.fixture
def k4():
    return MultiGraph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


@pytest.fixture
def triangle():
    return MultiGraph(3, [(0, 1), (1, 2), (0, 2)])
