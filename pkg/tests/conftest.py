import numpy as np
import pytest

from hgnoise.distribution import Distribution
from hgnoise.hypergraph import Hypergraph


def random_prob(n, delta, rng, support=None):
    """p_0 = 1 - delta exactly, remaining mass Dirichlet over ``support`` other masks."""
    size = 1 << n
    others = np.arange(1, size)
    if support is not None and support < others.size:
        others = rng.choice(others, size=support, replace=False)
    v = np.zeros(size)
    v[0] = 1.0 - delta
    v[others] = delta * rng.dirichlet(np.ones(others.size))
    return Distribution.from_dense(v)


def random_graph(n, rng, max_edges=6, orders=(2, 3)):
    edges = []
    for _ in range(rng.integers(0, max_edges + 1)):
        k = int(rng.choice([o for o in orders if o <= n]))
        edges.append(rng.choice(n, size=k, replace=False).tolist())
    return Hypergraph.from_edges(n, edges)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
