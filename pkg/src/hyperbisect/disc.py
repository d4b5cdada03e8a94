"""
Discrepancy of uniform hypergraphs

disc(U) = e(U) - p C(|U|, r) with p = e(H) / C(n, r). Every value here is
an exact Fraction; floats only appear in reports. Exhaustive routines walk
subsets in Gray-code order so each step updates the inside count of the
edges at one vertex only.

"""

import logging
import math
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from itertools import combinations, islice

import numpy as np

from . import cut as cutmod
from .embed import build_embedding
from .errors import GuardError, HypergraphError, NumericError
from .hypergraph import Hypergraph, shadow, without_boundary
from .utils import comb, map_ordered, rng_for

SUBSET_GUARD = 24
SCAN_GUARD = 16
ORACLE_GUARD = 20
POLY_GUARD = 14
BETA_GUARD = 12
ORACLE_CHUNK = 4096
DEGREE_FACTOR = 8


@dataclass(frozen=True)
class DiscReport:
    """
    Witness set with its discrepancy

    disc_plus, disc_minus and disc are only set by exhaustive search.
    splits[i] is disc_{i, r-i}(U, U^c) for the witness U.

    """

    witness: tuple[int, ...]
    value: Fraction
    method: str
    disc_plus: Fraction | None = None
    disc_minus: Fraction | None = None
    disc: Fraction | None = None
    minus_witness: tuple[int, ...] | None = None
    splits: tuple[Fraction, ...] = ()
    extras: dict = field(default_factory=dict)


@dataclass(frozen=True)
class SplitDisc:
    sizes: tuple[int, ...]
    parts: tuple[tuple[int, ...], ...]
    count: int
    disc: Fraction


@dataclass(frozen=True)
class PolyReport:
    """f(q) by enumeration against the split polynomial at grid points"""

    points: tuple[tuple[Fraction, Fraction, Fraction], ...]
    passed: bool


@dataclass(frozen=True)
class ShadowReport:
    t: int
    edges_lhs: int
    edges_rhs: int
    disc_lhs: Fraction
    disc_rhs: Fraction
    window_applicable: bool
    window: tuple[int, ...]
    passed: bool


@dataclass(frozen=True)
class ChainReport:
    """Bisection advantage against discrepancy of the two parts"""

    advantage: Fraction
    parts_disc: Fraction
    disc_plus: Fraction | None
    ok: bool


@dataclass(frozen=True)
class BernoulliReport:
    mean: float
    stderr: float
    bound: float
    ok: bool


def _uniform(h) -> None:
    if not isinstance(h, Hypergraph):
        raise HypergraphError(
            f"discrepancy needs a uniform Hypergraph, got {type(h).__name__}"
        )


def density(h: Hypergraph) -> Fraction:
    """p = e(H) / C(n, r)"""

    _uniform(h)
    return h.density


def disc_of(h: Hypergraph, U) -> Fraction:
    """
    disc(U) = e(U) - p C(|U|, r)

    Arguments:
        h (Hypergraph) : Uniform hypergraph
        U (Iterable[int]) : Vertex subset

    Returns:
        Fraction

    """

    U = set(U)
    return h.edges_within(U) - density(h) * comb(len(U), h.r)


def split_profile(h: Hypergraph, A, B) -> tuple[Fraction, ...]:
    """
    disc_{i, r-i}(A, B) for i = 0..r

    Entry i counts edges with exactly i vertices in A and r - i in B.

    """

    _uniform(h)
    _, _, _, mult, _ = h.arrays
    A, B = set(A), set(B)
    if A & B:
        raise HypergraphError("parts overlap")
    cnt_a = h.inside_counts(h.mask(A))
    cnt_b = h.inside_counts(h.mask(B))
    full = cnt_a + cnt_b == h.r
    counts = Counter()
    for i, m in zip(cnt_a[full].tolist(), mult[full].tolist()):
        counts[i] += m

    p = h.density
    return tuple(
        counts[i] - p * comb(len(A), i) * comb(len(B), h.r - i)
        for i in range(h.r + 1)
    )


def split_disc(h: Hypergraph, parts, sizes) -> SplitDisc:
    """
    Split discrepancy e_{s_1..s_k}(U_1..U_k) - p prod C(|U_i|, s_i)

    Arguments:
        h (Hypergraph) : Uniform hypergraph
        parts (Sequence) : Disjoint vertex sets U_1..U_k
        sizes (Sequence[int]) : Required intersection sizes, summing to r

    Returns:
        SplitDisc

    """

    _uniform(h)
    parts = tuple(tuple(sorted(set(part))) for part in parts)
    sizes = tuple(int(s) for s in sizes)
    if len(parts) != len(sizes):
        raise HypergraphError(f"{len(parts)} parts but {len(sizes)} sizes")
    if sum(sizes) != h.r:
        raise HypergraphError(f"sizes {sizes} do not sum to r={h.r}")
    seen = set()
    for part in parts:
        if seen.intersection(part):
            raise HypergraphError("parts overlap")
        seen.update(part)

    _, _, _, mult, _ = h.arrays
    match = np.ones(len(h.edges), dtype=bool)
    for part, size in zip(parts, sizes):
        match &= h.inside_counts(h.mask(part)) == size
    count = int(mult[match].sum())

    expected = h.density
    for part, size in zip(parts, sizes):
        expected *= comb(len(part), size)
    return SplitDisc(sizes, parts, count, count - expected)


def boundary(h, X) -> int:
    """|del(X)|: edges with at least one vertex in X, with multiplicity"""

    _, _, _, mult, _ = h.arrays
    cnt = h.inside_counts(h.mask(X))
    return int(mult[cnt > 0].sum())


def boundary_by_splits(h: Hypergraph, X) -> int:
    """Same count as boundary, summed over e_{r-i, i}(X, X^c) for i < r"""

    X = set(X)
    rest = set(range(h.n)) - X
    return sum(
        split_disc(h, (X, rest), (h.r - i, i)).count
        for i in range(h.r)
    )


def _gray_walk(h, free, fixed=()):
    """
    Yield (code, |U|, e(U)) for U = fixed plus every subset of free

    Bit j of code says whether free[j] is in U. Consecutive subsets differ
    by one vertex, and only edges at that vertex are updated.

    """

    n = h.n
    inc = h.incidence
    sizes = [len(e) for e in h.edges]
    mult = list(h.multiplicities)

    in_u = [False] * n
    for v in fixed:
        in_u[v] = True
    cnt = [sum(in_u[v] for v in e) for e in h.edges]
    e_in = sum(m for c, s, m in zip(cnt, sizes, mult) if c == s)
    size = len(fixed)
    code = 0
    yield code, size, e_in

    for i in range(1, 2 ** len(free)):
        bit = (i & -i).bit_length() - 1
        v = free[bit]
        if in_u[v]:
            for idx in inc[v]:
                if cnt[idx] == sizes[idx]:
                    e_in -= mult[idx]
                cnt[idx] -= 1
            size -= 1
        else:
            for idx in inc[v]:
                cnt[idx] += 1
                if cnt[idx] == sizes[idx]:
                    e_in += mult[idx]
            size += 1
        in_u[v] = not in_u[v]
        code ^= 1 << bit
        yield code, size, e_in


def _decode(free, code: int, fixed=()) -> tuple[int, ...]:
    return tuple(sorted(
        [*fixed, *(v for j, v in enumerate(free) if code >> j & 1)]
    ))


def disc_exact(h: Hypergraph, max_n: int = SUBSET_GUARD) -> DiscReport:
    """
    disc+, disc- and disc by walking all 2^n subsets

    Arguments:
        h (Hypergraph) : Uniform hypergraph

    Keyword arguments:
        max_n (int) : Largest vertex count allowed

    Returns:
        DiscReport : Witness of disc = max(disc+, disc-)

    Raises:
        GuardError : When n > max_n

    """

    _uniform(h)
    if h.n > max_n:
        raise GuardError(f"too large for exhaustive: n={h.n} > {max_n}")

    free = list(range(h.n))
    hi = [None] * (h.n + 1)
    lo = [None] * (h.n + 1)
    for code, size, e_in in _gray_walk(h, free):
        if hi[size] is None or e_in > hi[size][0]:
            hi[size] = (e_in, code)
        if lo[size] is None or e_in < lo[size][0]:
            lo[size] = (e_in, code)

    p = h.density
    plus = max(
        ((hi[k][0] - p * comb(k, h.r), k) for k in range(h.n + 1)),
        key=lambda item: (item[0], -item[1]),
    )
    minus = max(
        ((p * comb(k, h.r) - lo[k][0], k) for k in range(h.n + 1)),
        key=lambda item: (item[0], -item[1]),
    )
    plus_witness = _decode(free, hi[plus[1]][1])
    minus_witness = _decode(free, lo[minus[1]][1])
    witness = plus_witness if plus[0] >= minus[0] else minus_witness
    value = disc_of(h, witness)

    logging.getLogger(__name__).info(
        "Exhaustive disc over 2^%d subsets: disc+=%s disc-=%s",
        h.n, plus[0], minus[0],
    )
    return DiscReport(
        witness,
        value,
        'exhaustive',
        disc_plus=plus[0],
        disc_minus=minus[0],
        disc=max(plus[0], minus[0]),
        minus_witness=minus_witness,
        splits=split_profile(h, witness, set(range(h.n)) - set(witness)),
    )


def disc_exact_scan(h: Hypergraph, max_n: int = SCAN_GUARD) -> tuple[Fraction, Fraction]:
    """(disc+, disc-) by evaluating disc_of on every subset directly"""

    _uniform(h)
    if h.n > max_n:
        raise GuardError(f"too large for exhaustive: n={h.n} > {max_n}")
    plus = Fraction(0)
    minus = Fraction(0)
    for k in range(h.n + 1):
        for U in combinations(range(h.n), k):
            val = disc_of(h, U)
            plus = max(plus, val)
            minus = max(minus, -val)
    return plus, minus


def disc_plus_heuristic(
    h: Hypergraph,
    trials: int = 200,
    alpha: float = 0.05,
    seed: int = 0,
    threads: int | None = None,
) -> DiscReport:
    """
    Lower bound on disc+ from hyperplane roundings

    Both sides of every rounding are candidates; the best disc wins, ties
    going to the earlier trial and to X before Y.

    """

    _uniform(h)
    if h.nedges == 0:
        return DiscReport((), Fraction(0), 'rounding')

    emb = build_embedding(h, alpha)
    cuts = map_ordered(
        lambda t: cutmod.hyperplane_round(emb, seed, t),
        range(trials),
        threads,
    )

    p = h.density
    best = (Fraction(0), ())
    for c in cuts:
        for part, count in ((c.X, c.e_x), (c.Y, c.e_y)):
            val = count - p * comb(len(part), h.r)
            if val > best[0]:
                best = (val, part)

    logging.getLogger(__name__).info(
        "Rounding disc+ over %d trials: %s (|U|=%d)",
        trials, best[0], len(best[1]),
    )
    return DiscReport(best[1], best[0], 'rounding')


def beta_coefficients(s: int, b: int, r: int) -> tuple[Fraction, ...]:
    """
    beta_i = prod_{j<i} (b - j) / (s - j) for i = 0..r

    beta_i is the chance that i fixed vertices of a set of size s all land
    in a uniformly random b-subset.

    """

    if not 0 <= b <= s:
        raise ValueError(f"need 0 <= b <= s, got b={b}, s={s}")
    out = [Fraction(1)]
    for i in range(1, r + 1):
        j = i - 1
        if out[-1] == 0 or b - j <= 0:
            out.append(Fraction(0))
        else:
            out.append(out[-1] * Fraction(b - j, s - j))
    return tuple(out)


def split_expectation_exact(h: Hypergraph, X, b: int, max_rest: int = BETA_GUARD):
    """
    Mean of disc_{r-i, i}(X, Y) over every b-subset Y of X^c

    Returns:
        tuple : (expected, predicted), each indexed by i, the number of
            vertices in Y; predicted[i] = beta_i disc_{r-i, i}(X, X^c)

    """

    X = set(X)
    rest = [v for v in range(h.n) if v not in X]
    if len(rest) > max_rest:
        raise GuardError(f"too large for exhaustive: |X^c|={len(rest)} > {max_rest}")

    r = h.r
    beta = beta_coefficients(len(rest), b, r)
    totals = [Fraction(0)] * (r + 1)
    count = 0
    for Y in combinations(rest, b):
        prof = split_profile(h, X, Y)
        for i in range(r + 1):
            totals[i] += prof[r - i]
        count += 1
    expected = tuple(val / count for val in totals)

    full = split_profile(h, X, rest)
    predicted = tuple(beta[i] * full[r - i] for i in range(r + 1))
    return expected, predicted


def maxdeg_witness(h: Hypergraph, X, seed: int = 0, samples: int = 200) -> DiscReport:
    """
    Best disc(X u Y) over random floor(|X^c|/2)-subsets Y of X^c

    Arguments:
        h (Hypergraph) : Uniform hypergraph
        X (Iterable[int]) : High-degree vertices

    Keyword arguments:
        seed (int) : Random seed
        samples (int) : Number of random Y

    Returns:
        DiscReport : method 'maxdeg'

    """

    X = tuple(sorted(set(X)))
    rest = np.array([v for v in range(h.n) if v not in set(X)], dtype=np.int64)
    b = rest.size // 2
    rng = rng_for(seed, 0)

    best = None
    for _ in range(max(samples, 1)):
        Y = rng.choice(rest, size=b, replace=False) if b else []
        U = tuple(sorted((*X, *map(int, Y))))
        val = disc_of(h, U)
        if best is None or val > best[0]:
            best = (val, U)

    return DiscReport(
        best[1], best[0], 'maxdeg', extras={'s': int(rest.size), 'b': b},
    )


def large_degree_reduction(
    h: Hypergraph,
    C: float = DEGREE_FACTOR,
    seed: int = 0,
    trials: int = 200,
    samples: int = 200,
    alpha: float = 0.05,
    threads: int | None = None,
) -> DiscReport:
    """
    disc+ witness that copes with vertices of very high degree

    X is the set of vertices with degree above C d. Without such vertices
    this is the rounding heuristic. When del(X) holds at least half of the
    edges, the witness is X plus a random half of the rest; otherwise the
    rounding runs on H' = H - del(X) and its witness U satisfies
    disc_H(U) >= disc_H'(U) - |del(X)|, which is checked exactly.

    Returns:
        DiscReport : method 'reduction', value evaluated in H

    """

    log = logging.getLogger(__name__)
    _uniform(h)
    threshold = Fraction(C) * h.avg_degree
    X = [v for v, deg in enumerate(h.degrees) if deg > threshold]
    extras = {'threshold': threshold, 'high_degree': len(X)}

    if not X:
        rep = disc_plus_heuristic(h, trials, alpha, seed, threads)
        extras['branch'] = 'rounding'
        return DiscReport(rep.witness, rep.value, 'reduction', extras=extras)

    bd = boundary(h, X)
    extras['boundary'] = bd
    if 2 * bd >= h.nedges:
        rep = maxdeg_witness(h, X, seed, samples)
        extras['branch'] = 'maxdeg'
        extras.update(rep.extras)
    else:
        reduced = without_boundary(h, X)
        rep = disc_plus_heuristic(reduced, trials, alpha, seed, threads)
        extras['branch'] = 'reduced'
        value_reduced = disc_of(reduced, rep.witness)
        extras['reduced_value'] = value_reduced
        extras['correction_ok'] = disc_of(h, rep.witness) >= value_reduced - bd
        if not extras['correction_ok']:
            log.error(
                "Correction failed: disc_H(U)=%s < disc_H'(U) - |del(X)| = %s",
                disc_of(h, rep.witness), value_reduced - bd,
            )
            raise NumericError(
                f"disc_H(U) below disc_H'(U) - |del(X)| = {value_reduced - bd}"
            )

    value = disc_of(h, rep.witness)
    log.info(
        "Reduction: %d vertex(es) above %s, branch %s, disc_H(U)=%s",
        len(X), threshold, extras['branch'], value,
    )
    return DiscReport(rep.witness, value, 'reduction', extras=extras)


def poly_identity_check(
    h: Hypergraph,
    X,
    Y,
    points: int = 21,
    max_x: int = POLY_GUARD,
) -> PolyReport:
    """
    E disc(Z u Y) against sum_i q^i disc_{i, r-i}(X, Y)

    Z keeps each vertex of X independently with probability q. The left
    side is computed exactly by enumerating every Z, at q = k / (points-1).

    """

    _uniform(h)
    X = sorted(set(X))
    Y = sorted(set(Y))
    if set(X) & set(Y):
        raise HypergraphError("parts overlap")
    if len(X) > max_x:
        raise GuardError(f"too large for exhaustive: |X|={len(X)} > {max_x}")

    r, p = h.r, h.density
    edge_sums = [0] * (len(X) + 1)
    for _, size, e_in in _gray_walk(h, X, Y):
        edge_sums[size - len(Y)] += e_in
    sums = [
        edge_sums[k] - p * comb(len(X), k) * comb(k + len(Y), r)
        for k in range(len(X) + 1)
    ]
    prof = split_profile(h, X, Y)

    out = []
    for step in range(points):
        q = Fraction(step, max(points - 1, 1))
        lhs = sum(
            (val * q**k * (1 - q) ** (len(X) - k) for k, val in enumerate(sums)),
            Fraction(0),
        )
        rhs = sum((q**i * prof[i] for i in range(r + 1)), Fraction(0))
        out.append((q, lhs, rhs))
    return PolyReport(tuple(out), all(lhs == rhs for _, lhs, rhs in out))


def density_window(h: Hypergraph) -> tuple[bool, tuple[int, ...]]:
    """
    Shadow levels t in 2..r with 1/(2n) <= p_t <= 1/2

    Returns:
        tuple : (applicable, levels); applicable when
            1 <= d <= C(n-1, r-1) / 2, in which case levels is nonempty

    """

    _uniform(h)
    n, r = h.n, h.r
    d = h.avg_degree
    applicable = 1 <= d <= Fraction(comb(n - 1, r - 1), 2)
    p = h.density
    lo = Fraction(1, 2 * n) if n else Fraction(0)
    hi = Fraction(1, 2)
    levels = tuple(
        t for t in range(2, r + 1)
        if lo <= comb(n - t, r - t) * p <= hi
    )
    return applicable, levels


def shadow_decomposition_check(h: Hypergraph, U, t: int) -> ShadowReport:
    """
    Edges and discrepancy of the t-shadow on U against split counts in H

    e_{H_t}(U) = sum_{j=t..r} C(j, t) e_{j, r-j}(U, U^c), and the same
    weights carry disc_{H_t}(U) over to the split discrepancies.

    """

    _uniform(h)
    shad = shadow(h, t)
    U = set(U)
    rest = set(range(h.n)) - U

    edges_lhs = shad.edges_within(U)
    edges_rhs = sum(
        comb(j, t) * split_disc(h, (U, rest), (j, h.r - j)).count
        for j in range(t, h.r + 1)
    )
    disc_lhs = disc_of(shad, U)
    prof = split_profile(h, U, rest)
    disc_rhs = sum(
        (comb(j, t) * prof[j] for j in range(t, h.r + 1)),
        Fraction(0),
    )

    applicable, window = density_window(h)
    passed = (
        edges_lhs == edges_rhs
        and disc_lhs == disc_rhs
        and (not applicable or bool(window))
    )
    return ShadowReport(
        t, edges_lhs, edges_rhs, disc_lhs, disc_rhs, applicable, window, passed,
    )


def _oracle_chunk(h, n: int, combos: list, inc: np.ndarray) -> tuple[int, int]:
    masks = np.zeros((len(combos), n), dtype=np.int32)
    k = len(combos[0])
    if k:
        rows = np.repeat(np.arange(len(combos)), k)
        masks[rows, np.concatenate(combos)] = 1
    _, _, sizes, mult, _ = h.arrays
    counts = masks @ inc
    cut = (counts > 0) & (counts < sizes)
    cross = cut.astype(np.int64) @ mult
    idx = int(np.argmin(cross))
    return int(cross[idx]), idx


def oracle_bw(
    h,
    max_n: int = ORACLE_GUARD,
    threads: int | None = None,
) -> cutmod.CutResult:
    """
    Exact minimum bisection size by enumerating equipartitions

    For even n vertex 0 is pinned to X, so every equipartition is visited
    once. Chunks of candidates are scored in parallel and merged in order.

    Returns:
        CutResult : method 'oracle', with baselines filled in

    """

    if h.n > max_n:
        raise GuardError(f"too large for exhaustive: n={h.n} > {max_n}")

    n = h.n
    a = n // 2
    if n and n % 2 == 0:
        gen = ((0, *rest) for rest in combinations(range(1, n), a - 1))
    else:
        gen = combinations(range(n), a)

    chunks = []
    while True:
        block = [np.array(c, dtype=np.int64) for c in islice(gen, ORACLE_CHUNK)]
        if not block:
            break
        chunks.append(block)

    inc = np.zeros((n, len(h.edges)), dtype=np.int32)
    for idx, edge in enumerate(h.edges):
        inc[list(edge), idx] = 1

    scores = map_ordered(lambda blk: _oracle_chunk(h, n, blk, inc), chunks, threads)
    best = None
    for block, (cross, idx) in zip(chunks, scores):
        if best is None or cross < best[0]:
            best = (cross, block[idx])

    mask = np.zeros(n, dtype=bool)
    if best is not None:
        mask[best[1]] = True
    out = cutmod.cut_from_mask(h, mask, method='oracle')
    logging.getLogger(__name__).info("Exact bisection width %d on n=%d", out.cross, n)
    return cutmod.with_baselines(out, h)


def binomial_inequality(n: int, r: int) -> bool:
    """C(floor(n/2), r) + C(ceil(n/2), r) <= 2^(1-r) C(n, r), exact"""

    a, b = n // 2, n - n // 2
    return 2 ** (r - 1) * (comb(a, r) + comb(b, r)) <= comb(n, r)


def lemma_chain(h: Hypergraph, c: cutmod.CutResult | None = None, exhaustive: bool = True) -> ChainReport:
    """
    disc(X) + disc(Y) >= s(H) for an equipartition, hence disc+ >= s(H)/2

    Arguments:
        h (Hypergraph) : Uniform hypergraph

    Keyword arguments:
        c (CutResult) : Equipartition; defaults to the exact oracle
        exhaustive (bool) : Also compare with the exhaustive disc+

    """

    if c is None:
        c = oracle_bw(h)
    if c.advantage is None:
        c = cutmod.with_baselines(c, h)

    parts = disc_of(h, c.X) + disc_of(h, c.Y)
    ok = c.balanced and parts >= c.advantage
    plus = None
    if exhaustive:
        plus = disc_exact(h).disc_plus
        ok = ok and 2 * plus >= c.advantage
    return ChainReport(c.advantage, parts, plus, ok)


def bernoulli_check(a, samples: int = 10000, seed: int = 0) -> BernoulliReport:
    """
    Monte-Carlo E|sum a_i eps_i| for random signs against |a|_1 / sqrt(2n)

    ok allows four standard errors of slack.

    """

    a = np.asarray(a, dtype=float)
    rng = rng_for(seed, 0)
    signs = rng.choice(np.array([-1.0, 1.0]), size=(samples, a.size))
    vals = np.abs(signs @ a)
    mean = float(vals.mean())
    stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else 0.0
    bound = float(np.abs(a).sum() / math.sqrt(2 * a.size)) if a.size else 0.0
    return BernoulliReport(mean, stderr, bound, mean + 4 * stderr >= bound)
