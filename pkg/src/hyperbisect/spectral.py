"""
Adjacency map of a uniform hypergraph and spectral lower bounds

tau(x_1..x_r) sums x_1(v_1)...x_r(v_r) over ordered tuples whose vertex
set is an edge, divided by (r-1)!. sigma subtracts r e(H) / n^r times the
all-ones form, so sigma(1, ..., 1) = 0. The second-eigenvalue analogues
are suprema of sigma over unit L^p vectors; every routine here returns a
certificate, a stored vector whose value bounds the supremum from below.

"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations, permutations

import numpy as np
from scipy import linalg

from .disc import disc_of
from .errors import GeometryError, GuardError, HypergraphError, NumericError
from .hypergraph import Hypergraph
from .utils import falling, map_ordered, rng_for

MAX_R = 6
NORM_TOL = 1e-10
EXHAUSTIVE_GUARD = 16
LAMBDA2 = 'lambda2'
MU = 'mu'
SPARSE = 'sparse'
DENSE = 'dense'


@dataclass(frozen=True, eq=False)
class SpectralCertificate:
    """
    Unit L^p vectors and the value of sigma on them

    For kind 'lambda2' all slots hold the same vector and value is a lower
    bound on the supremum; for kind 'mu' value is |sigma(x_1..x_r)|.

    """

    kind: str
    p: float
    value: float
    vectors: tuple
    witness: tuple[int, ...] | None = None
    label: str = ''

    def __post_init__(self):
        for x in self.vectors:
            norm = pnorm(x, self.p)
            if abs(norm - 1.0) > NORM_TOL:
                raise GeometryError(f"certificate vector has L^{self.p} norm {norm!r}")

    @property
    def x(self) -> np.ndarray:
        return self.vectors[0]

    def pairs(self, slot: int = 0) -> list[tuple[int, float]]:
        """Nonzero (index, value) pairs of one slot"""

        x = self.vectors[slot]
        return [(int(i), float(x[i])) for i in np.flatnonzero(x)]


def pnorm(x, p: float) -> float:
    x = np.asarray(x, dtype=float)
    return float((np.abs(x) ** p).sum() ** (1.0 / p))


def _check_h(h) -> None:
    if not isinstance(h, Hypergraph):
        raise HypergraphError(
            f"adjacency map needs a uniform Hypergraph, got {type(h).__name__}"
        )
    if h.r > MAX_R:
        raise GuardError(f"permanent expansion limited to r <= {MAX_R}, got r={h.r}")


def _check_args(h, xs) -> list:
    if len(xs) != h.r:
        raise GeometryError(f"expected {h.r} vectors, got {len(xs)}")
    out = []
    for x in xs:
        x = x.tolist() if isinstance(x, np.ndarray) else list(x)
        if len(x) != h.n:
            raise GeometryError(f"dimension mismatch: vector of length {len(x)}, n={h.n}")
        out.append(x)
    return out


def _permanent(rows: list) -> object:
    """Permanent by direct expansion over all permutations"""

    total = 0
    for perm in permutations(range(len(rows))):
        term = 1
        for i, j in enumerate(perm):
            term = term * rows[i][j]
        total = total + term
    return total


def tau_eval(h: Hypergraph, xs) -> object:
    """
    Adjacency map tau(x_1, ..., x_r)

    Each edge contributes its multiplicity times the permanent of the
    r x r matrix [x_i(u_j)] over its vertices. Integer or Fraction inputs
    give an exact Fraction, float inputs a float.

    Arguments:
        h (Hypergraph) : Uniform hypergraph with r <= 6
        xs (Sequence) : r vectors of length n

    """

    _check_h(h)
    xs = _check_args(h, xs)
    total = 0
    for edge, mult in h.items():
        rows = [[x[u] for u in edge] for x in xs]
        total = total + mult * _permanent(rows)

    fact = math.factorial(h.r - 1)
    if isinstance(total, (int, Fraction)):
        return Fraction(total) / fact
    return total / fact


def sigma_eval(h: Hypergraph, xs) -> object:
    """sigma(x_1..x_r) = tau - (r e(H) / n^r) prod_i sum(x_i)"""

    tau = tau_eval(h, xs)
    xs = _check_args(h, xs)
    if h.n == 0:
        return tau
    prod = 1
    for x in xs:
        prod = prod * sum(x)
    return tau - Fraction(h.r * h.nedges, h.n ** h.r) * prod


def tau_multi(h: Hypergraph, xs) -> float:
    """Float tau(x_1..x_r) vectorized over edges, one pass per permutation"""

    _check_h(h)
    xs = np.asarray(xs, dtype=float)
    if xs.shape != (h.r, h.n):
        raise GeometryError(f"expected {h.r} vectors of length {h.n}, got {xs.shape}")
    if not h.edges:
        return 0.0
    edges = np.array(h.edges, dtype=np.int64)
    mult = np.array(h.multiplicities, dtype=float)
    total = 0.0
    for perm in permutations(range(h.r)):
        term = np.ones(len(edges))
        for i, j in enumerate(perm):
            term *= xs[i][edges[:, j]]
        total += float(mult @ term)
    return total / math.factorial(h.r - 1)


def sigma_multi(h: Hypergraph, xs) -> float:
    xs = np.asarray(xs, dtype=float)
    coef = h.r * h.nedges / float(h.n) ** h.r if h.n else 0.0
    return tau_multi(h, xs) - coef * float(np.prod(xs.sum(axis=1)))


def sigma_diag(h: Hypergraph, x) -> float:
    """
    sigma(x, ..., x) = r sum_e m(e) prod_{u in e} x(u) - (r e / n^r) (sum x)^r

    """

    x = np.asarray(x, dtype=float)
    r, n = h.r, h.n
    if n == 0:
        return 0.0
    flat, offsets, _, mult, _ = h.arrays
    tau = 0.0
    if flat.size:
        prods = np.multiply.reduceat(x[flat], offsets)
        tau = r * float(mult @ prods)
    return tau - r * h.nedges / float(n) ** r * float(x.sum()) ** r


def sigma_gradient(h: Hypergraph, x) -> np.ndarray:
    """
    Gradient of x -> sigma(x, ..., x)

    Entry v is r sum_{e containing v} m(e) prod_{u in e, u != v} x(u)
    minus r (r e / n^r) (sum x)^(r-1).

    """

    x = np.asarray(x, dtype=float)
    r, n = h.r, h.n
    grad = np.zeros(n)
    if h.edges:
        edges = np.array(h.edges, dtype=np.int64)
        mult = np.array(h.multiplicities, dtype=float)
        vals = x[edges]
        for j in range(r):
            others = np.prod(np.delete(vals, j, axis=1), axis=1)
            np.add.at(grad, edges[:, j], mult * others)
        grad *= r
    if n:
        grad -= r * (r * h.nedges / float(n) ** r) * float(x.sum()) ** (r - 1)
    return grad


def char_vector(n: int, U, p: float) -> np.ndarray:
    """|U|^(-1/p) times the indicator of U"""

    U = list(U)
    if not U:
        raise GeometryError("characteristic vector of an empty set")
    x = np.zeros(n)
    x[U] = len(U) ** (-1.0 / p)
    return x


def signed_vector(n: int, U, p: float) -> np.ndarray:
    """(1_U - 1_{U^c}) / n^(1/p)"""

    x = -np.ones(n)
    x[list(U)] = 1.0
    return x / n ** (1.0 / p)


def lemma_error_term(h: Hypergraph, U) -> Fraction:
    """
    r disc(U) minus sigma on the indicator of U, exact

    Equals d n (|U|^r / n^r - |U|...(|U|-r+1) / (n...(n-r+1))), and for
    a unit characteristic vector x, |U|^(r/p) sigma(x..x) = r disc(U) - err.

    """

    u, n, r = len(set(U)), h.n, h.r
    dn = r * h.nedges
    return dn * (Fraction(u**r, n**r) - Fraction(falling(u, r), falling(n, r)))


def _candidate_sets(h, sets, exhaustive: bool, random_sets: int, seed: int) -> list:
    n = h.n
    out = [('ones', tuple(range(n)))]
    out += [('singleton', (v,)) for v in range(n)]
    out += [('given', tuple(sorted(set(U)))) for U in (sets or ()) if U]

    rng = rng_for(seed, 0)
    half = (n + 1) // 2
    for _ in range(random_sets if half else 0):
        out.append(('random', tuple(sorted(rng.choice(n, half, replace=False).tolist()))))

    if exhaustive:
        if n > EXHAUSTIVE_GUARD:
            raise GuardError(f"too large for exhaustive: n={n} > {EXHAUSTIVE_GUARD}")
        out += [
            ('exhaustive', U)
            for k in range(1, n + 1)
            for U in combinations(range(n), k)
        ]
    return out


def _vector_pool(h, p, sets, exhaustive, random_sets, seed, signed) -> list:
    pool = []
    for label, U in _candidate_sets(h, sets, exhaustive, random_sets, seed):
        pool.append((label, U, char_vector(h.n, U, p)))
        if signed and len(U) < h.n:
            pool.append((f"{label}-signed", U, signed_vector(h.n, U, p)))
    return pool


def lambda2_certificate(
    h: Hypergraph,
    p: float = 2.0,
    sets=None,
    exhaustive: bool = False,
    random_sets: int = 32,
    seed: int = 0,
    signed: bool = True,
    threads: int | None = None,
) -> SpectralCertificate:
    """
    Best sigma(x, ..., x) over a pool of unit vectors

    The pool holds characteristic vectors of the all-ones set, every
    singleton, the given sets (disc witnesses, say), random half-size
    sets and, for small n, every nonempty subset; with signed=True each
    set also contributes (1_U - 1_{U^c}) / n^(1/p). The all-ones vector
    gives 0, so the certificate is never negative.

    Arguments:
        h (Hypergraph) : Uniform hypergraph
        p (float) : Norm exponent, at least 1

    Returns:
        SpectralCertificate : kind 'lambda2'

    """

    if p < 1:
        raise GeometryError(f"norm exponent must be >= 1, got {p}")
    if h.n == 0:
        raise HypergraphError("no vertices")
    pool = _vector_pool(h, p, sets, exhaustive, random_sets, seed, signed)
    values = map_ordered(lambda item: sigma_diag(h, item[2]), pool, threads)

    idx = int(np.argmax(values))
    label, U, x = pool[idx]
    logging.getLogger(__name__).info(
        "lambda2 certificate p=%s over %d candidates: %.6g (%s, |U|=%d)",
        p, len(pool), values[idx], label, len(U),
    )
    return SpectralCertificate(
        LAMBDA2, p, float(values[idx]), (x,) * h.r, U, label,
    )


def mu_certificate(
    h: Hypergraph,
    p: float = 2.0,
    sets=None,
    exhaustive: bool = False,
    random_sets: int = 32,
    seed: int = 0,
    mode: str = SPARSE,
    threads: int | None = None,
) -> SpectralCertificate:
    """
    Best |sigma(x_1, ..., x_r)| over a pool of unit vectors

    Mode 'sparse' uses the diagonal pool of lambda2_certificate. Mode
    'dense' also draws random half-size sets U and tries the tuples
    that alternate the characteristic vectors of U and of its complement.

    Returns:
        SpectralCertificate : kind 'mu'

    """

    if mode not in (SPARSE, DENSE):
        raise ValueError(f"unknown mode {mode!r}")
    if p < 1:
        raise GeometryError(f"norm exponent must be >= 1, got {p}")
    if h.n == 0:
        raise HypergraphError("no vertices")

    pool = [
        (label, U, (x,) * h.r)
        for label, U, x in _vector_pool(h, p, sets, exhaustive, random_sets, seed, True)
    ]
    if mode == DENSE and h.n > 1:
        rng = rng_for(seed, 1)
        half = (h.n + 1) // 2
        for _ in range(4 * random_sets):
            U = tuple(sorted(rng.choice(h.n, half, replace=False).tolist()))
            rest = [v for v in range(h.n) if v not in set(U)]
            a, b = char_vector(h.n, U, p), char_vector(h.n, rest, p)
            pool.append(('dense', U, tuple(a if i % 2 == 0 else b for i in range(h.r))))

    def value(item):
        label, _, xs = item
        if label == 'dense':
            return abs(sigma_multi(h, xs))
        return abs(sigma_diag(h, xs[0]))

    values = map_ordered(value, pool, threads)
    idx = int(np.argmax(values))
    label, U, xs = pool[idx]
    logging.getLogger(__name__).info(
        "mu certificate p=%s over %d candidates: %.6g (%s)",
        p, len(pool), values[idx], label,
    )
    return SpectralCertificate(MU, p, float(values[idx]), xs, U, label)


def lemma_bound_check(h: Hypergraph, cert: SpectralCertificate, sets) -> bool:
    """
    n^(r/p) value >= r disc(U) - err(U) for every given set U

    The right side is |U|^(r/p) sigma on the characteristic vector of U.

    """

    lhs = h.n ** (h.r / cert.p) * cert.value
    for U in sets:
        if not U:
            continue
        rhs = float(h.r * disc_of(h, U) - lemma_error_term(h, U))
        if lhs < rhs - 1e-9 * max(1.0, abs(rhs)):
            logging.getLogger(__name__).error(
                "Certificate %.6g below r disc(U) - err(U) = %.6g", lhs, rhs,
            )
            return False
    return True


def local_ascent(
    h: Hypergraph,
    p: float,
    x0,
    steps: int = 200,
    step_size: float = 1e-2,
) -> SpectralCertificate:
    """
    Improve sigma(x, ..., x) by normalized gradient steps

    Each step moves along the exact gradient and rescales to unit L^p
    norm. Improving steps are kept and grow the step by 1.5; others halve
    it. A non-finite value stops the ascent with the best vector so far.

    Arguments:
        h (Hypergraph) : Uniform hypergraph
        p (float) : Norm exponent
        x0 (ndarray) : Starting vector with unit L^p norm

    Keyword arguments:
        steps (int) : Number of steps
        step_size (float) : Initial step

    Returns:
        SpectralCertificate : kind 'lambda2', never below sigma(x0)

    """

    log = logging.getLogger(__name__)
    x = np.asarray(x0, dtype=float).copy()
    norm = pnorm(x, p)
    if abs(norm - 1.0) > NORM_TOL:
        raise GeometryError(f"start vector has L^{p} norm {norm!r}, expected 1")
    val = sigma_diag(h, x)
    if not math.isfinite(val):
        raise NumericError("sigma is not finite at the start vector")

    eta = step_size
    accepted = 0
    for _ in range(steps):
        y = x + eta * sigma_gradient(h, x)
        norm = pnorm(y, p)
        if not math.isfinite(norm) or norm == 0.0:
            log.warning("Ascent stopped: step norm %r", norm)
            break
        y /= norm
        new = sigma_diag(h, y)
        if not math.isfinite(new):
            log.warning("Ascent stopped: non-finite value")
            break
        if new > val:
            x, val = y, new
            eta *= 1.5
            accepted += 1
        else:
            eta /= 2.0
            if eta < 1e-14:
                break

    log.debug("Ascent kept %d of %d steps, value %.8g", accepted, steps, val)
    return SpectralCertificate(LAMBDA2, p, float(val), (x,) * h.r, None, 'ascent')


def eigen_oracle(h: Hypergraph) -> tuple[float, float, np.ndarray]:
    """
    Exact values for graphs at p = 2

    Returns:
        tuple : (lambda2, mu, eigenvector of lambda2) from the symmetric
            matrix A - (2 e / n^2) J

    """

    if h.r != 2:
        raise HypergraphError(f"eigen oracle needs a graph, got r={h.r}")
    n = h.n
    mat = np.zeros((n, n))
    for (u, v), m in h.items():
        mat[u, v] += m
        mat[v, u] += m
    mat -= 2.0 * h.nedges / n**2
    vals, vecs = linalg.eigh(mat)
    return float(vals[-1]), float(np.abs(vals).max()), vecs[:, -1]


def hypertree_radius(r: int, d: int) -> float:
    """Spectral radius r/(r-1) ((r-1)(d-1))^(1/r) of the infinite d-regular hypertree"""

    return r / (r - 1) * ((r - 1) * (d - 1)) ** (1.0 / r)
