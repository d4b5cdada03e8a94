"""
Sparse unit-vector embedding of a hypergraph

Vertex v gets x_v with x_v(v) = 1 and x_v(u) = s for every co-edge
neighbor u, where s = alpha / sqrt(2 r Delta). The normalized vectors
y_v = x_v / |x_v| are the rows of a CSR matrix, so Gram entries and
rounding projections are sparse products.

"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .errors import EmbeddingError

ALPHA_MAX = 0.1
NORM_TOL = 1e-10


@dataclass(frozen=True, eq=False)
class Embedding:
    """
    Built embedding with the quantities it was built from

    Attributes:
        hypergraph : Source hypergraph
        alpha (float) : Tuning constant in (0, 0.1]
        delta (int) : Maximum degree of the hypergraph
        scale (float) : s = alpha / sqrt(2 r delta)
        matrix (csr_matrix) : Row v is y_v
        sq_norms (ndarray) : |x_v|^2 = 1 + |N(v)| s^2

    """

    hypergraph: object
    alpha: float
    delta: int
    scale: float
    matrix: sparse.csr_matrix
    sq_norms: np.ndarray

    @property
    def n(self) -> int:
        return self.matrix.shape[0]

    @property
    def r(self) -> int:
        return self.hypergraph.r

    @property
    def small_degree(self) -> bool:
        """True when off-diagonal products are not guaranteed below alpha"""

        s = self.scale
        return 2 * s + (self.r - 1) * self.delta * s * s >= self.alpha

    def gram(self) -> sparse.csr_matrix:
        return (self.matrix @ self.matrix.T).tocsr()

    def to_text(self) -> str:
        """Coordinate/value dump, one line per vertex"""

        lines = []
        mat = self.matrix
        for v in range(self.n):
            start, stop = mat.indptr[v], mat.indptr[v + 1]
            pairs = ' '.join(
                f"{u}:{val:.12g}"
                for u, val in zip(mat.indices[start:stop], mat.data[start:stop])
            )
            lines.append(f"{v} {pairs}")
        return '\n'.join(lines) + '\n'


@dataclass(frozen=True)
class ScalarSumReport:
    """Pair sum of the embedding against 4 r Delta alpha^2 n"""

    pair_sum: float
    bound: float
    holds: bool
    assumption_holds: bool
    ok: bool


def check_alpha(alpha: float) -> None:
    if not 0.0 < alpha <= ALPHA_MAX:
        raise EmbeddingError(f"alpha out of range: {alpha} not in (0, {ALPHA_MAX}]")


def build_embedding(h, alpha: float = 0.05) -> Embedding:
    """
    Build the sparse embedding of a hypergraph

    Arguments:
        h (Hypergraph | MixedHypergraph) : Source hypergraph; for mixed
            hypergraphs r is the maximum edge size

    Keyword arguments:
        alpha (float) : Tuning constant, 0 < alpha <= 0.1

    Returns:
        Embedding

    Raises:
        EmbeddingError : 'alpha out of range', 'empty hypergraph', or a
            broken invariant

    """

    log = logging.getLogger(__name__)
    check_alpha(alpha)
    delta = h.max_degree
    if delta == 0:
        raise EmbeddingError("empty hypergraph: maximum degree is 0")

    s = alpha / math.sqrt(2 * h.r * delta)
    nbrs = h.co_neighbors

    indptr = np.zeros(h.n + 1, dtype=np.int64)
    indices = []
    data = []
    sq_norms = np.empty(h.n)
    for v in range(h.n):
        cols = sorted((v, *nbrs[v]))
        sq_norms[v] = 1.0 + len(nbrs[v]) * s * s
        inv = 1.0 / math.sqrt(sq_norms[v])
        indices.extend(cols)
        data.extend(inv if u == v else s * inv for u in cols)
        indptr[v + 1] = len(indices)

    matrix = sparse.csr_matrix(
        (np.array(data), np.array(indices, dtype=np.int64), indptr),
        shape=(h.n, h.n),
    )
    sq_norms.setflags(write=False)
    emb = Embedding(h, float(alpha), delta, s, matrix, sq_norms)

    if emb.small_degree:
        log.warning(
            "Small-degree regime (Delta=%d, r=%d, alpha=%s): products below "
            "alpha are not guaranteed", delta, h.r, alpha,
        )
    check_invariants(emb)
    log.info(
        "Built embedding n=%d Delta=%d alpha=%s scale=%.6g nnz=%d",
        h.n, delta, alpha, s, matrix.nnz,
    )
    return emb


def check_invariants(e: Embedding) -> None:
    """
    Assert the embedding invariants over every vertex and pair

    Raises:
        EmbeddingError : On a norm outside [1, 2], a non-unit y_v, a
            co-edge pair below the scale, or (outside the small-degree
            regime) a product reaching alpha

    """

    sq = e.sq_norms
    if sq.size and (sq.min() < 1.0 or sq.max() > 2.0):
        raise EmbeddingError(
            f"|x_v|^2 outside [1, 2]: [{sq.min():.6g}, {sq.max():.6g}]"
        )

    gram = e.gram()
    diag = gram.diagonal()
    bad = np.flatnonzero(np.abs(diag - 1.0) > NORM_TOL)
    if bad.size:
        raise EmbeddingError(f"y_{int(bad[0])} is not a unit vector")

    off = sparse.triu(gram, k=1).tocoo()
    if off.nnz:
        if off.data.min() < 0.0:
            raise EmbeddingError("negative product between embedded vectors")
        worst = off.data.max()
        if worst >= e.alpha:
            msg = f"product {worst:.6g} reaches alpha={e.alpha}"
            if not e.small_degree:
                raise EmbeddingError(msg)
            logging.getLogger(__name__).warning(msg)

    rows, cols = _co_edge_pairs(e.hypergraph)
    if rows.size:
        vals = np.asarray(gram[rows, cols]).ravel()
        low = vals.min()
        if low < e.scale - NORM_TOL:
            raise EmbeddingError(
                f"co-edge product {low:.6g} below scale {e.scale:.6g}"
            )


def _co_edge_pairs(h) -> tuple[np.ndarray, np.ndarray]:
    rows = []
    cols = []
    for v, nbrs in enumerate(h.co_neighbors):
        for u in nbrs:
            if u > v:
                rows.append(v)
                cols.append(u)
    return np.array(rows, dtype=np.int64), np.array(cols, dtype=np.int64)


def pairwise_products(e: Embedding, pairs) -> np.ndarray:
    """
    <y_u, y_v> for a batch of vertex pairs

    Arguments:
        e (Embedding) : Built embedding
        pairs (Iterable) : (u, v) vertex pairs

    Returns:
        ndarray : One product per pair

    """

    pairs = np.asarray(list(pairs), dtype=np.int64).reshape(-1, 2)
    if pairs.shape[0] == 0:
        return np.zeros(0)
    mat = e.matrix
    prods = mat[pairs[:, 0]].multiply(mat[pairs[:, 1]])
    return np.asarray(prods.sum(axis=1)).ravel()


def pair_sum(e: Embedding) -> float:
    """Sum of <y_u, y_v> over unordered pairs by column aggregation"""

    colsum = np.asarray(e.matrix.sum(axis=0)).ravel()
    return float((colsum @ colsum - e.matrix.data @ e.matrix.data) / 2.0)


def pair_sum_naive(e: Embedding) -> float:
    """Same sum by the double loop over pairs; for small n only"""

    total = 0.0
    rows = [e.matrix.getrow(v) for v in range(e.n)]
    for u in range(e.n):
        for v in range(u + 1, e.n):
            total += rows[u].multiply(rows[v]).sum()
    return float(total)


def scalar_sum_bound_check(e: Embedding) -> ScalarSumReport:
    """
    Compare the pair sum with 4 r Delta alpha^2 n

    The bound is only promised when Delta is large enough; here that is
    made concrete as the worst-case pair sum of the unnormalized vectors,
    n (r-1) Delta s + n ((r-1) Delta s)^2 / 2, staying under the bound.
    Both sides are always reported; ok is False only when the assumption
    holds and the bound does not.

    """

    n, r, delta, s = e.n, e.r, e.delta, e.scale
    total = pair_sum(e)
    bound = 4.0 * r * delta * e.alpha**2 * n
    spread = (r - 1) * delta * s
    assumption = n * spread + n * spread * spread / 2.0 <= bound
    holds = total <= bound
    if assumption and not holds:
        logging.getLogger(__name__).error(
            "Pair sum %.6g exceeds bound %.6g", total, bound,
        )
    return ScalarSumReport(total, bound, holds, assumption, holds or not assumption)
