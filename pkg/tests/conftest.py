from pathlib import Path

import pytest

from cva_lab.models import ModelConfig, build_model
from cva_lab.sampling import Budget
from cva_lab.topology import discrete_topology, generate_topology

TRIANGLE_GROUND = ["a", "b", "c", "d", "e", "f"]
TRIANGLE_SUBBASIS = [["d", "a", "e"], ["e", "b", "f"], ["f", "c", "d"]]


@pytest.fixture(scope="session")
def test_dir():
    return Path(__file__).parent.joinpath("test_files").resolve()


@pytest.fixture(scope="session")
def triangle():
    return generate_topology(TRIANGLE_GROUND, TRIANGLE_SUBBASIS)


@pytest.fixture(scope="session")
def one_atom():
    return discrete_topology(["x"])


@pytest.fixture(scope="session")
def two_atoms():
    return discrete_topology(["x", "y"])


@pytest.fixture(scope="session")
def action_model(one_atom):
    return build_model(ModelConfig(model="action", topology=one_atom, values=[0, 1], cap=2))


@pytest.fixture(scope="session")
def state_model(two_atoms):
    return build_model(ModelConfig(model="state", topology=two_atoms, values=[0, 1], cap=3))


@pytest.fixture(scope="session")
def relative_model(two_atoms):
    return build_model(ModelConfig(model="relative", topology=two_atoms, values=[0, 1], cap=3))


@pytest.fixture(scope="session")
def db_model(triangle):
    return build_model(ModelConfig(model="db", topology=triangle, values=[0, 1]))


@pytest.fixture(scope="session")
def action_budget():
    return Budget(samples=100, max_traces=2, max_length=1, exhaustive_limit=2000, seed=0)


@pytest.fixture(scope="session")
def trace_budget():
    return Budget(samples=40, max_traces=3, max_length=2, exhaustive_limit=2000, seed=0)


def state(**values):
    """Canonical state on the atoms given as keywords."""
    return tuple(sorted(values.items()))


def get_model(name, topology, values=(0, 1), cap=3):
    return build_model(ModelConfig(model=name, topology=topology, values=list(values), cap=cap))
