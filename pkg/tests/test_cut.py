"""Unit tests for rounding, balancing and the bisection driver."""

import math
from fractions import Fraction
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbisect.cut import (
    GREEDY,
    MODES,
    PAPER,
    asymptotic_baseline,
    balance,
    bisect,
    bisect_mixed,
    cut_from_mask,
    hyperplane_round,
    partition_counts,
    random_bisection_expectation,
    refine,
)
from hyperbisect.disc import oracle_bw
from hyperbisect.embed import build_embedding
from hyperbisect.errors import EmbeddingError, HypergraphError
from hyperbisect.hypergraph import (
    Hypergraph,
    MixedHypergraph,
    gen_random_binomial,
    gen_random_regular,
)


# Baselines


def test_k4_baselines(k4):
    """Test exact baselines of K4."""
    assert random_bisection_expectation(k4) == 4
    assert asymptotic_baseline(k4) == 3


def test_single_edge_baseline():
    """Test that one 3-edge on six vertices is cut with probability 9/10."""
    h = Hypergraph(6, 3, [(0, 1, 2)])
    assert random_bisection_expectation(h) == Fraction(9, 10)


def test_mixed_asymptotic_baseline():
    """Test the per-edge-size baseline on disjoint 2- and 3-edges."""
    h = MixedHypergraph(5, [(0, 1), (2, 3, 4)])
    assert asymptotic_baseline(h) == Fraction(5, 4)


def test_random_bisection_expectation_brute_force(small_random):
    """Test the closed form against the mean over every equipartition."""
    h = small_random
    crosses = [
        partition_counts(h, h.mask(X))[2]
        for X in combinations(range(h.n), h.n // 2)
    ]
    assert random_bisection_expectation(h) == Fraction(sum(crosses), len(crosses))


def test_random_bisection_expectation_monte_carlo():
    """Test the exact expectation against 10^5 random equipartitions at n = 100."""
    h = gen_random_regular(100, 3, 6, seed=2)
    edges = np.array(h.edges)
    mult = np.array(h.multiplicities, dtype=float)
    rng = np.random.default_rng(0)
    crosses = []
    for _ in range(10):
        in_x = rng.random((10_000, h.n)).argsort(axis=1) < h.n // 2
        inside = in_x[:, edges].sum(axis=2)
        crosses.append(((inside > 0) & (inside < h.r)).astype(float) @ mult)
    crosses = np.concatenate(crosses)
    se = crosses.std(ddof=1) / math.sqrt(crosses.size)
    assert abs(crosses.mean() - float(random_bisection_expectation(h))) <= 4 * se


@pytest.mark.parametrize('r', [2, 3, 4])
def test_random_bisection_approaches_asymptote(r):
    """Test that the exact expectation is within 2 r^2 / n of e(H)(1 - 2^(1-r)), relative."""
    for n in range(2 * r, 201):
        h = Hypergraph(n, r, [tuple(range(r)), tuple(range(r, 2 * r))])
        asym = asymptotic_baseline(h)
        gap = abs(random_bisection_expectation(h) - asym)
        assert gap <= Fraction(2 * r * r, n) * asym, n


# Rounding and balancing


def test_partition_counts_sum(fano):
    """Test that e(X), e(Y) and cross add up to e(H)."""
    e_x, e_y, cross = partition_counts(fano, fano.mask([0, 1, 3]))
    assert (e_x, e_y) == (1, 0)
    assert e_x + e_y + cross == fano.nedges


def test_hyperplane_round_reproducible(small_random):
    """Test that a trial depends only on (seed, trial)."""
    emb = build_embedding(small_random)
    a = hyperplane_round(emb, seed=4, trial=2)
    b = hyperplane_round(emb, seed=4, trial=2)
    assert a == b
    assert a.e_x + a.e_y + a.cross == small_random.nedges


def test_rounding_mean_part_size(small_random):
    """Test that the mean |X| over 10^4 roundings is n/2 within four standard errors."""
    emb = build_embedding(small_random)
    sizes = np.array([
        len(hyperplane_round(emb, seed=5, trial=t).X) for t in range(10_000)
    ])
    se = sizes.std(ddof=1) / math.sqrt(sizes.size)
    assert abs(sizes.mean() - small_random.n / 2) <= 4 * se


def _inside_excess(alpha, trials, seed):
    h = Hypergraph(3, 3, [(0, 1, 2)])
    emb = build_embedding(h, alpha)
    inside = sum(hyperplane_round(emb, seed=seed, trial=t).e_x for t in range(trials))
    q = 2.0 ** -h.r
    return inside / trials - q, math.sqrt(q * (1 - q) / trials)


def test_rounding_single_edge_excess():
    """Test that a single edge falls inside X more often than 2^-r."""
    excess, se = _inside_excess(0.1, 20_000, seed=6)
    assert excess >= 4 * se


@pytest.mark.slow
def test_rounding_single_edge_excess_default_alpha():
    """Test the single-edge excess at the default alpha over 10^6 roundings."""
    excess, se = _inside_excess(0.05, 1_000_000, seed=7)
    assert excess >= 4 * se


@given(
    st.integers(0, 2**16),
    st.lists(st.booleans(), min_size=11, max_size=11),
    st.sampled_from(MODES),
)
@settings(max_examples=40, deadline=None)
def test_balance_equipartition(seed, flags, mode):
    """Test that balancing reaches an equipartition losing at most Delta per move."""
    h = gen_random_binomial(11, 3, 0.2, seed=seed)
    c = cut_from_mask(h, np.array(flags))
    moves = max(h.n // 2 - min(len(c.X), len(c.Y)), 0)
    out = balance(c, h, mode=mode, seed=seed)
    assert out.balanced
    assert out.e_x + out.e_y >= c.e_x + c.e_y - h.max_degree * moves


def test_balance_unknown_mode(k4):
    """Test that an unknown mode is rejected."""
    c = cut_from_mask(k4, np.array([True, False, False, False]))
    with pytest.raises(ValueError):
        balance(c, k4, mode='random')


@given(st.integers(0, 2**16))
@settings(max_examples=30, deadline=None)
def test_refine_never_worsens(seed):
    """Test that pair moves keep part sizes and never grow the cut."""
    h = gen_random_binomial(10, 3, 0.3, seed=seed)
    rng = np.random.default_rng(seed)
    mask = np.zeros(10, dtype=bool)
    mask[rng.choice(10, 5, replace=False)] = True
    c = cut_from_mask(h, mask)
    out = refine(c, h)
    assert len(out.X) == len(c.X)
    assert out.cross <= c.cross


# Driver


def test_bisect_k4(k4):
    """Test that K4 is bisected with four crossing edges."""
    res = bisect(k4, trials=20, seed=0)
    assert res.balanced
    assert res.cross == 4
    assert res.baseline == 4
    assert res.advantage == -1


def test_bisect_matching(matching):
    """Test that the rounding keeps most matching edges inside the parts."""
    res = bisect(matching, trials=200, seed=0, mode=GREEDY)
    assert res.balanced
    assert res.cross <= 2


def test_bisect_no_edges():
    """Test the first-half split for an edgeless hypergraph."""
    res = bisect(Hypergraph(5, 3, []))
    assert res.X == (0, 1)
    assert res.cross == 0
    assert res.baseline == 0


def test_bisect_thread_independent(small_random):
    """Test that the result does not depend on the worker count."""
    a = bisect(small_random, trials=30, seed=3, threads=1)
    b = bisect(small_random, trials=30, seed=3, threads=4)
    assert a == b


@pytest.mark.parametrize('mode', [PAPER, GREEDY])
def test_bisect_not_below_oracle(small_random, mode):
    """Test that no bisection beats the exact minimum."""
    res = bisect(small_random, trials=50, mode=mode)
    assert res.balanced
    assert res.cross >= oracle_bw(small_random).cross
    assert res.advantage == asymptotic_baseline(small_random) - res.cross


def test_bisect_tie_break_smallest_trial(small_random):
    """Test that the earliest trial wins among equal objectives."""
    emb = build_embedding(small_random, 0.05)
    rounds = [hyperplane_round(emb, 3, t) for t in range(40)]
    top = max(c.objective for c in rounds)
    res = bisect(small_random, trials=40, seed=3, mode=PAPER)
    assert res.trial == min(c.trial for c in rounds if c.objective == top)


def test_bisect_matches_oracle(oracle_instances):
    """Test validity on every instance and exactness on at least 60% of them."""
    exact = 0
    for h in oracle_instances:
        res = bisect(h, trials=500, seed=0)
        best = oracle_bw(h).cross
        assert res.balanced
        assert res.cross >= best
        exact += res.cross == best
    assert exact >= 0.6 * len(oracle_instances)


def test_bisect_invalid_arguments(k4):
    """Test validation of trials, mode and alpha."""
    with pytest.raises(ValueError):
        bisect(k4, trials=0)
    with pytest.raises(ValueError):
        bisect(k4, mode='random')
    with pytest.raises(EmbeddingError):
        bisect(k4, alpha=0.5)


def test_bisect_mixed():
    """Test mixed edge sizes against the per-edge-size baseline."""
    h = MixedHypergraph(8, [(0, 1), (2, 3, 4), (5, 6, 7), (1, 2)])
    res = bisect_mixed(h, trials=20)
    assert res.balanced
    assert res.advantage == asymptotic_baseline(h) - res.cross
    with pytest.raises(HypergraphError):
        bisect_mixed(Hypergraph(4, 2, [(0, 1)]))


@pytest.mark.slow
def test_bisect_beats_random_bisection():
    """Test that a random regular instance is cut below the random baseline."""
    h = gen_random_regular(200, 3, 16, seed=0)
    res = bisect(h, trials=200, seed=0)
    assert res.balanced
    assert res.cross < res.baseline


@pytest.mark.slow
def test_advantage_scales_with_sqrt_degree():
    """Test s(H) > 0 and a near degree-free s(H) / (sqrt(d) n) at n = 300, r = 3."""
    medians = {}
    for d in (4, 16):
        ratios = []
        for seed in range(20):
            h = gen_random_regular(300, 3, d, seed=seed)
            res = bisect(h, trials=400, seed=seed)
            assert res.balanced
            assert res.advantage > 0
            ratios.append(float(res.advantage) / (math.sqrt(d) * h.n))
        medians[d] = float(np.median(ratios))
    assert min(medians.values()) > 0
    assert max(medians.values()) < 2 * min(medians.values())
