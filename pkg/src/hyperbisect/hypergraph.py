"""
Hypergraph representation, validation and generators

Vertices are the integers 0..n-1. Edges are stored as sorted tuples and
deduplicated into (edge, multiplicity) pairs, so simple hypergraphs are
just the multiplicity-1 case. Objects are immutable after construction
and safe to share read-only between worker threads.

"""

import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from itertools import combinations
from collections.abc import Iterable, Sequence

import numpy as np

from .errors import HypergraphError
from .utils import comb

REGULAR_STALLS = 20


class _EdgeSet:
    """
    Shared machinery for uniform and mixed hypergraphs

    Subclasses only decide which edge sizes are legal via _check_size.

    """

    kind = ''

    def __init__(
        self,
        n: int,
        r: int,
        edges: Iterable[Sequence[int]] = (),
        multiplicities: Iterable[int] | None = None,
    ):
        n = int(n)
        r = int(r)
        if n < 0:
            raise HypergraphError(f"vertex count must be >= 0, got {n}")
        if r < 2:
            raise HypergraphError(f"uniformity must be >= 2, got {r}")
        self._n = n
        self._r = r

        edges = [tuple(int(v) for v in edge) for edge in edges]
        if multiplicities is None:
            mults = [1] * len(edges)
        else:
            mults = [int(m) for m in multiplicities]
            if len(mults) != len(edges):
                raise HypergraphError(
                    f"{len(mults)} multiplicities given for {len(edges)} edges"
                )

        counts = Counter()
        for edge, mult in zip(edges, mults):
            self._check_edge(edge)
            if mult < 1:
                raise HypergraphError(
                    f"multiplicity must be positive, got {mult} for {edge}"
                )
            counts[tuple(sorted(edge))] += mult

        self._edges = tuple(sorted(counts))
        self._mult = tuple(counts[edge] for edge in self._edges)

    def _check_size(self, edge: tuple) -> None:
        raise NotImplementedError

    def _check_edge(self, edge: tuple) -> None:
        """Raise on the first violated edge invariant"""

        self._check_size(edge)
        for v in edge:
            if not 0 <= v < self._n:
                raise HypergraphError(
                    f"vertex out of range: {v} not in [0, {self._n}) in edge {edge}"
                )
        if len(set(edge)) != len(edge):
            raise HypergraphError(f"repeated vertex in edge {edge}")

    def _rebuild(self, edges, multiplicities):
        """Same kind and vertex set, new edges"""

        raise NotImplementedError

    @property
    def n(self) -> int:
        return self._n

    @property
    def r(self) -> int:
        """Uniformity, or maximum allowed edge size for mixed hypergraphs"""
        return self._r

    @property
    def edges(self) -> tuple[tuple[int, ...], ...]:
        return self._edges

    @property
    def multiplicities(self) -> tuple[int, ...]:
        return self._mult

    @property
    def nedges(self) -> int:
        """e(H), counted with multiplicity"""
        return sum(self._mult)

    @property
    def is_simple(self) -> bool:
        return all(m == 1 for m in self._mult)

    def items(self):
        """Iterate over (edge, multiplicity) pairs"""
        return zip(self._edges, self._mult)

    @cached_property
    def degrees(self) -> tuple[int, ...]:
        deg = [0] * self._n
        for edge, mult in self.items():
            for v in edge:
                deg[v] += mult
        return tuple(deg)

    @property
    def max_degree(self) -> int:
        return max(self.degrees, default=0)

    @property
    def avg_degree(self) -> Fraction:
        if self._n == 0:
            return Fraction(0)
        return Fraction(sum(self.degrees), self._n)

    @cached_property
    def incidence(self) -> tuple[tuple[int, ...], ...]:
        """Per vertex, the indices of the edges containing it"""

        inc = [[] for _ in range(self._n)]
        for idx, edge in enumerate(self._edges):
            for v in edge:
                inc[v].append(idx)
        return tuple(tuple(item) for item in inc)

    @cached_property
    def co_neighbors(self) -> tuple[tuple[int, ...], ...]:
        """Per vertex, the sorted vertices sharing at least one edge with it"""

        nbrs = [set() for _ in range(self._n)]
        for edge in self._edges:
            for v in edge:
                nbrs[v].update(edge)
        for v, item in enumerate(nbrs):
            item.discard(v)
        return tuple(tuple(sorted(item)) for item in nbrs)

    @cached_property
    def arrays(self) -> tuple[np.ndarray, ...]:
        """
        Flattened edge arrays for vectorized counting

        Returns:
            tuple : (flat, offsets, sizes, mult, edge_of) where flat lists
                the vertices of every edge back to back, offsets[i] is the
                start of edge i in flat, and edge_of maps each flat entry
                to its edge index

        """

        sizes = np.array([len(e) for e in self._edges], dtype=np.int64)
        flat = np.array(
            [v for e in self._edges for v in e],
            dtype=np.int64,
        )
        offsets = np.zeros(len(sizes), dtype=np.int64)
        if len(sizes) > 1:
            offsets[1:] = np.cumsum(sizes)[:-1]
        mult = np.array(self._mult, dtype=np.int64)
        edge_of = np.repeat(np.arange(len(sizes), dtype=np.int64), sizes)
        for arr in (sizes, flat, offsets, mult, edge_of):
            arr.setflags(write=False)
        return flat, offsets, sizes, mult, edge_of

    def inside_counts(self, mask: np.ndarray) -> np.ndarray:
        """
        Number of vertices of each edge lying in a vertex set

        Arguments:
            mask (ndarray) : Boolean membership vector of length n

        Returns:
            ndarray : One count per distinct edge

        """

        flat, offsets, *_ = self.arrays
        if flat.size == 0:
            return np.zeros(0, dtype=np.int64)
        return np.add.reduceat(
            np.asarray(mask, dtype=np.int64)[flat],
            offsets,
        )

    def mask(self, vertices: Iterable[int]) -> np.ndarray:
        """Boolean membership vector for a vertex set"""

        out = np.zeros(self._n, dtype=bool)
        idx = list(vertices)
        if idx:
            out[idx] = True
        return out

    def edges_within(self, vertices: Iterable[int]) -> int:
        """e(U): edges entirely inside U, counted with multiplicity"""

        _, _, sizes, mult, _ = self.arrays
        cnt = self.inside_counts(self.mask(vertices))
        return int(mult[cnt == sizes].sum())

    def __eq__(self, other) -> bool:
        if type(other) is not type(self):
            return NotImplemented
        return (
            self._n == other._n
            and self._r == other._r
            and self._edges == other._edges
            and self._mult == other._mult
        )

    def __hash__(self) -> int:
        return hash((self.kind, self._n, self._r, self._edges, self._mult))

    def __repr__(self) -> str:
        return (
            f"{type(self).__name__}(n={self._n}, r={self._r}, "
            f"edges={len(self._edges)}, e={self.nedges})"
        )


class Hypergraph(_EdgeSet):
    """
    r-uniform multi-hypergraph

    Arguments:
        n (int) : Vertex count, vertices are 0..n-1
        r (int) : Uniformity, at least 2
        edges (Iterable) : Vertex tuples of size r, any order

    Keyword arguments:
        multiplicities (Iterable) : Positive count per given edge; repeated
            edges are merged by summing their counts

    """

    kind = 'uniform'

    def _check_size(self, edge):
        if len(edge) != self._r:
            raise HypergraphError(
                f"wrong edge size: {edge} has {len(edge)} vertices, expected {self._r}"
            )

    def _rebuild(self, edges, multiplicities):
        return Hypergraph(self._n, self._r, edges, multiplicities)

    @property
    def density(self) -> Fraction:
        """p = e(H) / C(n, r)"""

        total = comb(self._n, self._r)
        if total == 0:
            return Fraction(0)
        return Fraction(self.nedges, total)


class MixedHypergraph(_EdgeSet):
    """
    Hypergraph whose edges have between 2 and max_size vertices

    Arguments:
        n (int) : Vertex count
        edges (Iterable) : Vertex tuples of size 2..max_size

    Keyword arguments:
        multiplicities (Iterable) : As for Hypergraph
        max_size (int) : Largest allowed edge size; defaults to the largest
            edge given (2 for an empty edge list)

    """

    kind = 'mixed'

    def __init__(
        self,
        n: int,
        edges: Iterable[Sequence[int]] = (),
        multiplicities: Iterable[int] | None = None,
        max_size: int | None = None,
    ):
        edges = [tuple(edge) for edge in edges]
        if max_size is None:
            max_size = max((len(e) for e in edges), default=2)
        super().__init__(n, max_size, edges, multiplicities)

    def _check_size(self, edge):
        if not 2 <= len(edge) <= self._r:
            raise HypergraphError(
                f"wrong edge size: {edge} has {len(edge)} vertices, "
                f"expected 2..{self._r}"
            )

    def _rebuild(self, edges, multiplicities):
        return MixedHypergraph(
            self._n, edges, multiplicities, max_size=self._r,
        )


@dataclass(frozen=True)
class DegreeSummary:
    """Per-vertex degrees with the mean d and maximum Delta"""

    degrees: tuple[int, ...]
    d: Fraction
    delta: int


def validate(h: _EdgeSet) -> None:
    """
    Check every hypergraph invariant

    Arguments:
        h (Hypergraph | MixedHypergraph) : Hypergraph to check

    Raises:
        HypergraphError : Naming the first violated invariant

    """

    seen = set()
    for edge, mult in h.items():
        h._check_edge(edge)
        if list(edge) != sorted(edge):
            raise HypergraphError(f"edge not stored sorted: {edge}")
        if edge in seen:
            raise HypergraphError(f"duplicate edge entry: {edge}")
        seen.add(edge)
        if mult < 1:
            raise HypergraphError(f"multiplicity must be positive: {edge}")

    weighted = sum(len(e) * m for e, m in h.items())
    if sum(h.degrees) != weighted:
        raise HypergraphError(
            f"degree sum {sum(h.degrees)} does not match incidences {weighted}"
        )


def degrees(h: _EdgeSet) -> DegreeSummary:
    """Degrees with multiplicity, average degree d and maximum degree"""

    return DegreeSummary(h.degrees, h.avg_degree, h.max_degree)


def gen_random_binomial(n: int, r: int, p: float, seed: int = 0) -> Hypergraph:
    """
    Binomial random hypergraph

    Each of the C(n, r) possible edges is kept independently with
    probability p.

    Arguments:
        n (int) : Vertex count
        r (int) : Uniformity
        p (float) : Edge probability in [0, 1]

    Keyword arguments:
        seed (int) : Random seed

    Returns:
        Hypergraph

    """

    if r > n:
        raise HypergraphError(f"r > n: cannot place {r}-sets on {n} vertices")
    if not 0.0 <= p <= 1.0:
        raise HypergraphError(f"edge probability must be in [0, 1], got {p}")

    rng = np.random.default_rng(seed)
    keep = rng.random(comb(n, r)) < p
    edges = [
        edge
        for edge, flag in zip(combinations(range(n), r), keep)
        if flag
    ]
    logging.getLogger(__name__).debug(
        "Binomial hypergraph n=%d r=%d p=%s: %d edges", n, r, p, len(edges),
    )
    return Hypergraph(n, r, edges)


def _try_regular(n: int, r: int, d: int, rng: np.random.Generator):
    """
    One stub-matching attempt

    Stubs are shuffled and cut into groups of r; groups with a repeated
    vertex or duplicating an accepted edge go back into the pool, which is
    reshuffled. Returns None when the pool stops making progress.

    """

    edges = set()
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    stalls = 0
    while stubs.size:
        rng.shuffle(stubs)
        leftover = []
        accepted = 0
        for group in stubs.reshape(-1, r):
            edge = tuple(sorted(group.tolist()))
            if len(set(edge)) == r and edge not in edges:
                edges.add(edge)
                accepted += 1
            else:
                leftover.extend(edge)

        if accepted == 0:
            stalls += 1
            if stalls > REGULAR_STALLS:
                return None
        stubs = np.array(leftover, dtype=np.int64)

    return edges


def gen_random_regular(
    n: int,
    r: int,
    d: int,
    seed: int = 0,
    max_retries: int = 1000,
) -> Hypergraph:
    """
    Simple d-regular r-uniform hypergraph by stub matching

    This is a configuration-style construction with rejection of defective
    groups; it is not a uniform sample from all d-regular hypergraphs.

    Arguments:
        n (int) : Vertex count
        r (int) : Uniformity
        d (int) : Degree of every vertex

    Keyword arguments:
        seed (int) : Random seed
        max_retries (int) : Number of full attempts before giving up

    Returns:
        Hypergraph

    Raises:
        HypergraphError : 'infeasible' when n*d is not divisible by r (or
            d is too large), 'retries exhausted' when all attempts stall

    """

    log = logging.getLogger(__name__)
    if r > n:
        raise HypergraphError(f"infeasible: r={r} > n={n}")
    if d < 0:
        raise HypergraphError(f"infeasible: negative degree {d}")
    if (n * d) % r != 0:
        raise HypergraphError(
            f"infeasible: n*d={n * d} is not divisible by r={r}"
        )
    if d > comb(n - 1, r - 1):
        raise HypergraphError(
            f"infeasible: d={d} exceeds C(n-1, r-1)={comb(n - 1, r - 1)}"
        )

    rng = np.random.default_rng(seed)
    for attempt in range(max_retries):
        edges = _try_regular(n, r, d, rng)
        if edges is not None:
            log.debug(
                "Regular hypergraph n=%d r=%d d=%d after %d attempt(s)",
                n, r, d, attempt + 1,
            )
            return Hypergraph(n, r, sorted(edges))

    raise HypergraphError(
        f"retries exhausted: no {d}-regular {r}-uniform hypergraph on "
        f"{n} vertices after {max_retries} attempts"
    )


def shadow(h: Hypergraph, t: int) -> Hypergraph:
    """
    t-uniform shadow multi-hypergraph H_t

    The multiplicity of a t-set f is the number of edges of H containing
    it, counted with multiplicity. H_r is H itself.

    """

    if not 2 <= t <= h.r:
        raise HypergraphError(f"t out of range: {t} not in [2, {h.r}]")
    if t == h.r:
        return h

    counts = Counter()
    for edge, mult in h.items():
        for sub in combinations(edge, t):
            counts[sub] += mult
    return Hypergraph(h.n, t, list(counts), list(counts.values()))


def without_boundary(h: _EdgeSet, vertices: Iterable[int]) -> _EdgeSet:
    """H' = H minus every edge meeting the given vertex set"""

    drop = set(vertices)
    kept = [(e, m) for e, m in h.items() if drop.isdisjoint(e)]
    return h._rebuild([e for e, _ in kept], [m for _, m in kept])


def complement(h: Hypergraph) -> Hypergraph:
    """All r-sets that are not edges; defined for simple hypergraphs only"""

    if not h.is_simple:
        raise HypergraphError("complement needs a simple hypergraph")
    present = set(h.edges)
    edges = [e for e in combinations(range(h.n), h.r) if e not in present]
    return Hypergraph(h.n, h.r, edges)


def complete_hypergraph(n: int, r: int) -> Hypergraph:
    return Hypergraph(n, r, combinations(range(n), r))


def fano_plane() -> Hypergraph:
    """The 7 lines of the Fano plane, {i, i+1, i+3} mod 7"""

    return Hypergraph(7, 3, [(i, (i + 1) % 7, (i + 3) % 7) for i in range(7)])


def perfect_matching(n: int) -> Hypergraph:
    if n % 2:
        raise HypergraphError(f"perfect matching needs even n, got {n}")
    return Hypergraph(n, 2, [(2 * i, 2 * i + 1) for i in range(n // 2)])


def complete_bipartite(a: int, b: int) -> Hypergraph:
    """K_{a,b} with parts 0..a-1 and a..a+b-1"""

    return Hypergraph(
        a + b, 2, [(u, a + v) for u in range(a) for v in range(b)],
    )


def star_hypergraph(n: int, r: int, center: int = 0) -> Hypergraph:
    """
    Every edge contains the center

    The remaining vertices are cut into consecutive blocks of r-1, each
    block forming one edge with the center; leftover vertices are isolated.

    """

    others = [v for v in range(n) if v != center]
    blocks = [
        others[i:i + r - 1]
        for i in range(0, len(others) - r + 2, r - 1)
    ]
    return Hypergraph(n, r, [(center, *block) for block in blocks])
