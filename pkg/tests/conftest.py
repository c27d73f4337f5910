import numpy as np
import pytest

from hexsse.lattice import build_lattice
from hexsse.oracle import double_hexagon_graph, ladder_graph, random_spin_graph, ring_graph


@pytest.fixture(scope="session")
def lat_l1():
    return build_lattice(5, 2)


@pytest.fixture(scope="session")
def lat_ferro():
    return build_lattice(5, 2, "ferro")


@pytest.fixture(scope="session")
def toy_graphs():
    return {
        "ring6": ring_graph(6, 1),
        "ladder8": ladder_graph(4),
        "random10": random_spin_graph(10),
    }


@pytest.fixture(scope="session")
def hexpair():
    return double_hexagon_graph()


@pytest.fixture()
def rng():
    return np.random.default_rng(20240527)


def random_spins(rng, nn):
    return rng.choice(np.array([-1, 1], np.int8), size=nn)
