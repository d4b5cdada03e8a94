"""Unit tests for the sparse vector embedding."""

import logging
import math

import numpy as np
import pytest

from hyperbisect.embed import (
    build_embedding,
    check_invariants,
    pair_sum,
    pair_sum_naive,
    pairwise_products,
    scalar_sum_bound_check,
)
from hyperbisect.errors import EmbeddingError
from hyperbisect.hypergraph import Hypergraph, gen_random_regular


def test_fano_embedding(fano):
    """Test scale, norms and sparsity on the Fano plane."""
    emb = build_embedding(fano, 0.05)
    s = 0.05 / math.sqrt(2 * 3 * 3)
    assert emb.delta == 3
    assert emb.scale == pytest.approx(s)
    assert np.allclose(emb.sq_norms, 1.0 + 6 * s * s)
    assert emb.matrix.nnz == 49
    assert np.allclose(emb.gram().diagonal(), 1.0)
    assert not emb.small_degree


def test_products_bounded(fano):
    """Test that co-edge products lie in [scale, alpha)."""
    emb = build_embedding(fano, 0.05)
    prods = pairwise_products(emb, [(0, 1), (2, 5), (4, 6)])
    assert np.all(prods >= emb.scale - 1e-12)
    assert np.all(prods < emb.alpha)


@pytest.mark.parametrize('alpha', [0.0, -0.1, 0.2])
def test_alpha_out_of_range(fano, alpha):
    """Test the allowed range of alpha."""
    with pytest.raises(EmbeddingError, match='alpha out of range'):
        build_embedding(fano, alpha)


def test_empty_hypergraph():
    """Test that an edgeless hypergraph has no embedding."""
    with pytest.raises(EmbeddingError, match='empty hypergraph'):
        build_embedding(Hypergraph(5, 3, []))


def test_small_degree_warns(matching, caplog):
    """Test the warning for maximum degree one."""
    with caplog.at_level(logging.WARNING, logger='hyperbisect'):
        emb = build_embedding(matching, 0.05)
    assert emb.small_degree
    assert any('Small-degree' in rec.message for rec in caplog.records)


@pytest.mark.parametrize('seed', range(50))
def test_invariants_on_random_instances(seed):
    """Test every embedding invariant on regular instances with r in {2, 3, 4}."""
    r = 2 + seed % 3
    n = r * (5 + 3 * seed % 45)
    h = gen_random_regular(n, r, 2 + seed % 5, seed=seed)
    emb = build_embedding(h, 0.05)
    check_invariants(emb)
    if n <= 50:
        assert pair_sum(emb) == pytest.approx(pair_sum_naive(emb), rel=1e-9)


def test_pair_sum_methods_agree(small_random):
    """Test column aggregation against the double loop."""
    emb = build_embedding(small_random, 0.05)
    assert pair_sum(emb) == pytest.approx(pair_sum_naive(emb), rel=1e-9)


def test_to_text_lists_every_vertex(fano):
    """Test the coordinate dump."""
    text = build_embedding(fano).to_text()
    lines = text.splitlines()
    assert len(lines) == 7
    assert lines[0].startswith('0 0:')


def test_scalar_sum_bound():
    """Test the pair sum bound on a regular hypergraph of moderate degree."""
    h = gen_random_regular(60, 3, 10, seed=1)
    rep = scalar_sum_bound_check(build_embedding(h, 0.05))
    assert rep.assumption_holds
    assert rep.holds
    assert rep.ok
    assert rep.pair_sum <= rep.bound
