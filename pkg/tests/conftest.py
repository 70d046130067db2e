import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from stochpack.generators import bipartite_instance, graph_instance
from stochpack.instances import StochasticObjective


@pytest.fixture
def k22():
    """Complete 2x2 bipartite graph; edges (0,2),(0,3),(1,2),(1,3)."""
    return bipartite_instance(2, 2, [(0, 2), (0, 3), (1, 2), (1, 3)])


@pytest.fixture
def triangle():
    return graph_instance(3, [(0, 1), (0, 2), (1, 2)])


@pytest.fixture
def c4():
    """4-cycle as a bipartite graph: sides {0,1} and {2,3}."""
    return bipartite_instance(2, 2, [(0, 2), (0, 3), (1, 2), (1, 3)])


@pytest.fixture
def unit_objective():
    def make(m, p=0.5, low=0, high=1):
        return StochasticObjective(
            c_minus=np.full(m, low, dtype=np.int64),
            c_plus=np.full(m, high, dtype=np.int64),
            p=p,
        )

    return make
