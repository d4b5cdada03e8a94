"""Unit tests for the adjacency map and spectral certificates."""

import math
from fractions import Fraction
from itertools import permutations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperbisect.disc import disc_of, disc_plus_heuristic
from hyperbisect.errors import GeometryError, GuardError, HypergraphError
from hyperbisect.hypergraph import Hypergraph, gen_random_binomial, gen_random_regular
from hyperbisect.spectral import (
    DENSE,
    LAMBDA2,
    MU,
    SpectralCertificate,
    char_vector,
    eigen_oracle,
    hypertree_radius,
    lambda2_certificate,
    lemma_bound_check,
    lemma_error_term,
    local_ascent,
    mu_certificate,
    pnorm,
    sigma_diag,
    sigma_eval,
    sigma_gradient,
    signed_vector,
    tau_eval,
    tau_multi,
)


# Evaluation


def test_tau_of_ones(small_random):
    """Test that tau(1, ..., 1) = r e(H)."""
    ones = [1] * small_random.n
    h = small_random
    assert tau_eval(h, [ones] * h.r) == h.r * h.nedges
    assert sigma_eval(h, [ones] * h.r) == 0


def test_tau_exact_against_vectorized(small_random):
    """Test exact tau against the vectorized float version."""
    rng = np.random.default_rng(0)
    xs = rng.integers(-3, 4, size=(small_random.r, small_random.n))
    exact = tau_eval(small_random, [list(map(int, x)) for x in xs])
    assert isinstance(exact, Fraction)
    assert float(exact) == pytest.approx(tau_multi(small_random, xs))


@given(st.integers(0, 2**16), st.integers(2, 12))
@settings(max_examples=40, deadline=None)
def test_tau_is_bilinear_form_for_graphs(seed, n):
    """Test tau(x, y) = x^T A y exactly for graphs."""
    h = gen_random_binomial(n, 2, 0.4, seed=seed)
    adj = np.zeros((n, n), dtype=np.int64)
    for (u, v), m in h.items():
        adj[u, v] += m
        adj[v, u] += m
    x, y = np.random.default_rng(seed).integers(-5, 6, size=(2, n))
    assert tau_eval(h, [x.tolist(), y.tolist()]) == int(x @ adj @ y)


def test_tau_symmetric_and_multilinear(small_random):
    """Test invariance under argument permutations and linearity in each slot."""
    h = small_random
    rng = np.random.default_rng(7)
    xs = [row.tolist() for row in rng.integers(-4, 5, size=(h.r, h.n))]
    base = tau_eval(h, xs)
    for perm in permutations(range(h.r)):
        assert tau_eval(h, [xs[i] for i in perm]) == base

    z = rng.integers(-4, 5, size=h.n).tolist()
    a, b = Fraction(2, 3), Fraction(-5, 2)
    for slot in range(h.r):
        mixed = [a * xi + b * zi for xi, zi in zip(xs[slot], z)]
        lhs = tau_eval(h, xs[:slot] + [mixed] + xs[slot + 1:])
        rhs = a * base + b * tau_eval(h, xs[:slot] + [z] + xs[slot + 1:])
        assert lhs == rhs


def test_sigma_diag_matches_general(small_random):
    """Test the diagonal shortcut against the general form."""
    rng = np.random.default_rng(1)
    x = rng.standard_normal(small_random.n)
    general = sigma_eval(small_random, [x] * small_random.r)
    assert sigma_diag(small_random, x) == pytest.approx(float(general))


@pytest.mark.parametrize('seed', range(20))
def test_gradient_finite_difference(seed):
    """Test the gradient against central differences."""
    r = 2 + seed % 3
    h = gen_random_binomial(8 + seed % 4, r, 0.4, seed=seed)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(h.n)
    grad = sigma_gradient(h, x)
    eps = 1e-5
    for v in range(h.n):
        step = np.zeros(h.n)
        step[v] = eps
        num = (sigma_diag(h, x + step) - sigma_diag(h, x - step)) / (2 * eps)
        assert grad[v] == pytest.approx(num, rel=1e-6, abs=1e-6)


def test_argument_checks(small_random):
    """Test wrong vector counts, lengths and the uniformity guard."""
    ones = [1] * small_random.n
    with pytest.raises(GeometryError):
        tau_eval(small_random, [ones] * 2)
    with pytest.raises(GeometryError, match='dimension mismatch'):
        tau_eval(small_random, [[1, 2]] * small_random.r)
    big = Hypergraph(7, 7, [tuple(range(7))])
    with pytest.raises(GuardError):
        tau_eval(big, [[1] * 7] * 7)


# Vectors and the error term


def test_unit_vectors():
    """Test the L^p norms of characteristic and signed vectors."""
    assert pnorm(char_vector(10, (1, 4, 5), 3.0), 3.0) == pytest.approx(1.0)
    assert pnorm(signed_vector(10, (1, 4, 5), 3.0), 3.0) == pytest.approx(1.0)
    with pytest.raises(GeometryError):
        char_vector(10, (), 2.0)


@given(st.integers(0, 2**16), st.integers(1, 2**10 - 1), st.sampled_from([2.0, 3.0, 4.5]))
@settings(max_examples=30, deadline=None)
def test_characteristic_identity(seed, code, p):
    """Test |U|^(r/p) sigma(x_U) = r disc(U) - err(U) for unit characteristic vectors."""
    h = gen_random_binomial(10, 3, 0.3, seed=seed)
    U = [v for v in range(10) if code >> v & 1]
    lhs = len(U) ** (h.r / p) * sigma_diag(h, char_vector(h.n, U, p))
    rhs = float(h.r * disc_of(h, U) - lemma_error_term(h, U))
    assert lhs == pytest.approx(rhs, rel=1e-9, abs=1e-9)


# Certificates


def test_k66_values(k66):
    """Test lambda2 = 0 and mu = 6 for K_{6,6} at p = 2."""
    lam, mu, _ = eigen_oracle(k66)
    assert lam == pytest.approx(0.0, abs=1e-9)
    assert mu == pytest.approx(6.0)

    cert = lambda2_certificate(k66, p=2.0)
    assert cert.kind == LAMBDA2
    assert cert.value == pytest.approx(0.0, abs=1e-9)

    cert = mu_certificate(k66, p=2.0, sets=[tuple(range(6))])
    assert cert.kind == MU
    assert cert.value == pytest.approx(6.0)


def test_two_k4_lambda2(two_k4):
    """Test that the signed split of two K4 copies reaches lambda2 = 3."""
    lam, _, _ = eigen_oracle(two_k4)
    assert lam == pytest.approx(3.0)
    cert = lambda2_certificate(two_k4, p=2.0, sets=[(0, 1, 2, 3)])
    assert cert.value == pytest.approx(3.0)
    assert cert.label == 'given-signed'


def test_local_ascent(two_k4):
    """Test that the ascent improves a random start without passing lambda2."""
    rng = np.random.default_rng(3)
    x0 = rng.standard_normal(8)
    x0 /= pnorm(x0, 2.0)
    start = sigma_diag(two_k4, x0)
    cert = local_ascent(two_k4, 2.0, x0, steps=300)
    assert cert.value >= start
    assert cert.value <= 3.0 + 1e-9
    assert pnorm(cert.x, 2.0) == pytest.approx(1.0)


@pytest.mark.parametrize('seed', range(6))
def test_local_ascent_reaches_lambda2(seed):
    """Test that ascent at p = 2 gets within 1e-3 of the exact lambda2 of a graph."""
    h = gen_random_binomial(20 + 6 * seed, 2, 0.2, seed=seed)
    lam, _, _ = eigen_oracle(h)
    x0 = np.random.default_rng(seed).standard_normal(h.n)
    x0 /= pnorm(x0, 2.0)
    cert = local_ascent(h, 2.0, x0, steps=5000)
    assert cert.value <= lam + 1e-9
    assert lam - cert.value <= 1e-3


def test_local_ascent_needs_unit_start(two_k4):
    """Test that the start vector must be normalized."""
    with pytest.raises(GeometryError):
        local_ascent(two_k4, 2.0, np.ones(8))


def test_certificate_never_negative(small_random):
    """Test that the all-ones candidate keeps lambda2 certificates at or above 0."""
    cert = lambda2_certificate(small_random, p=3.0, random_sets=8)
    assert cert.value >= -1e-12
    assert lemma_bound_check(small_random, cert, [cert.witness])


def test_lemma_bound_with_exhaustive_pool():
    """Test the certificate against r disc(U) - err(U) for every subset offered."""
    h = gen_random_binomial(8, 3, 0.4, seed=4)
    sets = [(0, 1, 2), (3, 4, 5, 6), (1, 7)]
    cert = lambda2_certificate(h, p=3.0, sets=sets, exhaustive=True)
    assert lemma_bound_check(h, cert, sets)


def test_dense_mu_certificate(small_random):
    """Test that the dense pool never does worse than the sparse one."""
    sparse = mu_certificate(small_random, p=3.0, random_sets=4)
    dense = mu_certificate(small_random, p=3.0, random_sets=4, mode=DENSE)
    assert dense.value >= sparse.value


@pytest.mark.parametrize('seed', range(5))
def test_mu_at_least_lambda2(seed):
    """Test that the mu certificate is never below lambda2 on the same candidates."""
    h = gen_random_binomial(12, 3, 0.3, seed=seed)
    for p in (2.0, 3.0):
        lam = lambda2_certificate(h, p=p, random_sets=8, seed=seed)
        mu = mu_certificate(h, p=p, random_sets=8, seed=seed)
        assert mu.value >= lam.value


def test_exhaustive_guard():
    """Test the size guard of the exhaustive pool."""
    with pytest.raises(GuardError):
        lambda2_certificate(Hypergraph(20, 2, [(0, 1)]), exhaustive=True)


def test_certificate_checks_norm():
    """Test that certificates store unit vectors only."""
    with pytest.raises(GeometryError):
        SpectralCertificate(LAMBDA2, 2.0, 0.0, (np.ones(4),))


def test_eigen_oracle_needs_graph(fano):
    """Test that the eigen oracle is for graphs."""
    with pytest.raises(HypergraphError):
        eigen_oracle(fano)


def test_hypertree_radius():
    """Test the graph case 2 sqrt(d - 1)."""
    assert hypertree_radius(2, 3) == pytest.approx(2 * math.sqrt(2))


@pytest.mark.slow
def test_lambda2_scales_with_sqrt_degree():
    """Test that the p = r certificate grows by a factor in [1.4, 2.8] when d goes 4 -> 16."""
    medians = {}
    for d in (4, 16):
        values = []
        for seed in range(5):
            h = gen_random_regular(300, 3, d, seed=seed)
            witness = disc_plus_heuristic(h, seed=seed).witness
            lam = lambda2_certificate(h, p=3.0, sets=[witness], seed=seed)
            mu = mu_certificate(h, p=3.0, sets=[witness], seed=seed)
            assert mu.value >= lam.value
            assert lemma_bound_check(h, lam, [witness])
            values.append(lam.value)
        medians[d] = float(np.median(values))
    assert medians[4] > 0
    assert 1.4 <= medians[16] / medians[4] <= 2.8
