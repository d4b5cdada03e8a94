import os
import tempfile
from itertools import combinations

# Keep settings and log files out of the real home directory
os.environ.setdefault(
    'HYPERBISECT_HOME', tempfile.mkdtemp(prefix='hyperbisect-test-'),
)

import pytest

from hyperbisect.hypergraph import (
    Hypergraph,
    complete_bipartite,
    complete_hypergraph,
    fano_plane,
    gen_random_binomial,
    perfect_matching,
)


@pytest.fixture
def k4():
    return complete_hypergraph(4, 2)


@pytest.fixture
def fano():
    return fano_plane()


@pytest.fixture
def matching():
    return perfect_matching(8)


@pytest.fixture
def k66():
    return complete_bipartite(6, 6)


@pytest.fixture
def two_k4():
    """Two disjoint copies of K4 on 0..3 and 4..7"""
    return Hypergraph(
        8, 2, [*combinations(range(4), 2), *combinations(range(4, 8), 2)],
    )


@pytest.fixture
def small_random():
    return gen_random_binomial(10, 3, 0.3, seed=1)


@pytest.fixture(scope='session')
def oracle_instances():
    """200 binomial instances with n in {10, 12, 14} and r in {2, 3}"""
    out = []
    for seed in range(200):
        r = 2 + seed % 2
        n = (10, 12, 14)[seed // 2 % 3]
        out.append(gen_random_binomial(n, r, 0.3 if r == 2 else 0.1, seed=seed))
    return out
