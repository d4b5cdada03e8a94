"""
Hyperplane rounding, balancing and the bisection driver

A rounding draws one Gaussian direction w and puts v in X when
<y_v, w> >= 0. The driver keeps the rounding with the best objective
e(X) + e(Y) - Delta * ||X| - |Y||, then moves vertices from the larger
part until the parts differ in size by at most one.

"""

import logging
from collections import Counter
from dataclasses import dataclass, replace
from fractions import Fraction

import numpy as np

from .embed import Embedding, build_embedding, check_alpha
from .errors import HypergraphError
from .hypergraph import MixedHypergraph
from .utils import comb, map_ordered, rng_for

PAPER = 'paper'
GREEDY = 'greedy'
MODES = (PAPER, GREEDY)
BALANCE_KEY = 1


@dataclass(frozen=True)
class CutResult:
    """
    Vertex bipartition with its edge counts

    cross counts edges meeting both parts; advantage and baseline are only
    filled in by the bisection driver once the parts are balanced.

    """

    X: tuple[int, ...]
    Y: tuple[int, ...]
    e_x: int
    e_y: int
    cross: int
    delta: int
    seed: int = 0
    trial: int = 0
    method: str = 'round'
    advantage: Fraction | None = None
    baseline: Fraction | None = None

    @property
    def n(self) -> int:
        return len(self.X) + len(self.Y)

    @property
    def imbalance(self) -> int:
        return abs(len(self.X) - len(self.Y))

    @property
    def balanced(self) -> bool:
        return self.imbalance <= 1

    @property
    def objective(self) -> int:
        return self.e_x + self.e_y - self.delta * self.imbalance

    @property
    def size(self) -> int:
        """Bisection size, the number of edges meeting both parts"""
        return self.cross

    def mask(self) -> np.ndarray:
        out = np.zeros(self.n, dtype=bool)
        if self.X:
            out[list(self.X)] = True
        return out


def partition_counts(h, mask: np.ndarray) -> tuple[int, int, int]:
    """
    (e(X), e(Y), cross) for X given as a membership mask

    Arguments:
        h (Hypergraph | MixedHypergraph) : Hypergraph
        mask (ndarray) : Boolean vector, True for vertices of X

    """

    _, _, sizes, mult, _ = h.arrays
    cnt = h.inside_counts(mask)
    e_x = int(mult[cnt == sizes].sum())
    e_y = int(mult[cnt == 0].sum())
    return e_x, e_y, h.nedges - e_x - e_y


def cut_from_mask(h, mask, delta: int | None = None, **kwargs) -> CutResult:
    mask = np.asarray(mask, dtype=bool)
    e_x, e_y, cross = partition_counts(h, mask)
    return CutResult(
        tuple(np.flatnonzero(mask).tolist()),
        tuple(np.flatnonzero(~mask).tolist()),
        e_x,
        e_y,
        cross,
        h.max_degree if delta is None else delta,
        **kwargs,
    )


def hyperplane_round(e: Embedding, seed: int, trial: int = 0) -> CutResult:
    """
    One random-hyperplane rounding of an embedding

    Arguments:
        e (Embedding) : Built embedding
        seed (int) : Master seed

    Keyword arguments:
        trial (int) : Trial index; the direction depends on (seed, trial)

    Returns:
        CutResult : Unbalanced cut with X = {v : <y_v, w> >= 0}

    """

    rng = rng_for(seed, trial)
    w = rng.standard_normal(e.n)
    mask = (e.matrix @ w) >= 0.0
    return cut_from_mask(e.hypergraph, mask, e.delta, seed=seed, trial=trial)


def _move_gains(h, cnt: np.ndarray, side: np.ndarray) -> np.ndarray:
    """
    Change in e(X) + e(Y) when one vertex leaves its side

    cnt[i] is the number of vertices of edge i on the side being left. An
    edge lying entirely on that side is destroyed, and an edge whose only
    vertex there is the mover becomes internal to the other side. Vertices
    not in side get -inf.

    """

    flat, _, sizes, mult, edge_of = h.arrays
    gains = np.full(h.n, -np.inf)
    if flat.size:
        per_edge = mult * (
            (cnt == 1).astype(np.int64) - (cnt == sizes).astype(np.int64)
        )
        totals = np.bincount(flat, weights=per_edge[edge_of], minlength=h.n)
        gains[side] = totals[side]
    else:
        gains[side] = 0.0
    return gains


def _leave(h, cnt: np.ndarray, v: int) -> None:
    inc = h.incidence[v]
    if inc:
        cnt[list(inc)] -= 1


def balance(
    c: CutResult,
    h,
    mode: str = GREEDY,
    seed: int = 0,
) -> CutResult:
    """
    Move vertices into the smaller part until the cut is an equipartition

    Parts are first swapped so that |X| <= |Y|, then floor(n/2) - |X|
    vertices move from Y to X. Mode 'paper' moves a seeded random set;
    mode 'greedy' repeatedly moves the vertex of Y whose move loses the
    fewest internal edges (ties to the smallest index). Either way every
    move loses at most Delta internal edges.

    Arguments:
        c (CutResult) : Cut to balance
        h (Hypergraph | MixedHypergraph) : Hypergraph the cut belongs to

    Keyword arguments:
        mode (str) : 'paper' or 'greedy'
        seed (int) : Seed for mode 'paper'

    Returns:
        CutResult

    """

    if mode not in MODES:
        raise ValueError(f"unknown balance mode {mode!r}, expected one of {MODES}")

    mask = c.mask()
    if len(c.X) > len(c.Y):
        mask = ~mask
    k = h.n // 2 - int(mask.sum())
    if k <= 0:
        return cut_from_mask(
            h, mask, c.delta, seed=c.seed, trial=c.trial, method=mode,
        )

    in_y = ~mask
    if mode == PAPER:
        rng = rng_for(seed, c.trial, BALANCE_KEY)
        moved = rng.choice(np.flatnonzero(in_y), size=k, replace=False)
        mask[moved] = True
    else:
        cnt_y = h.inside_counts(in_y)
        for _ in range(k):
            v = int(np.argmax(_move_gains(h, cnt_y, in_y)))
            in_y[v] = False
            _leave(h, cnt_y, v)
        mask = ~in_y

    out = cut_from_mask(h, mask, c.delta, seed=c.seed, trial=c.trial, method=mode)
    logging.getLogger(__name__).debug(
        "Balanced trial %d with %d %s move(s): e(X)+e(Y) %d -> %d",
        c.trial, k, mode, c.e_x + c.e_y, out.e_x + out.e_y,
    )
    return out


def refine(c: CutResult, h, max_rounds: int | None = None) -> CutResult:
    """
    Balance-preserving pair moves

    Each round moves the best vertex from X to Y and then the best other
    vertex from Y to X, keeping the pair when the combined change in
    e(X) + e(Y) is positive. Stops at the first non-improving pair. The
    cross size never increases.

    Arguments:
        c (CutResult) : Cut to refine
        h (Hypergraph | MixedHypergraph) : Hypergraph the cut belongs to

    Keyword arguments:
        max_rounds (int) : Cap on accepted pairs; defaults to e(H)

    Returns:
        CutResult

    """

    in_x = c.mask()
    if not in_x.any() or in_x.all():
        return c

    _, _, sizes, _, _ = h.arrays
    cnt_x = h.inside_counts(in_x)
    rounds = h.nedges if max_rounds is None else max_rounds
    accepted = 0
    while accepted < rounds:
        gains = _move_gains(h, cnt_x, in_x)
        u = int(np.argmax(gains))
        in_x[u] = False
        _leave(h, cnt_x, u)

        in_y = ~in_x
        in_y[u] = False
        back = _move_gains(h, sizes - cnt_x, in_y)
        v = int(np.argmax(back))
        if gains[u] + back[v] <= 0:
            in_x[u] = True
            cnt_x[list(h.incidence[u])] += 1
            break
        in_x[v] = True
        cnt_x[list(h.incidence[v])] += 1
        accepted += 1

    if accepted == 0:
        return c
    logging.getLogger(__name__).debug("Refined with %d pair move(s)", accepted)
    return cut_from_mask(
        h, in_x, c.delta, seed=c.seed, trial=c.trial, method=c.method,
    )


def asymptotic_baseline(h) -> Fraction:
    """Sum over edges of m(e) (1 - 2^(1 - |e|)), exact"""

    return sum(
        (m * (1 - Fraction(1, 2 ** (len(e) - 1))) for e, m in h.items()),
        Fraction(0),
    )


def random_bisection_expectation(h) -> Fraction:
    """
    Expected bisection size of a uniformly random equipartition

    An edge of size k stays uncut with probability
    [C(n-k, a-k) + C(n-k, b-k)] / C(n, a) where a = floor(n/2) and
    b = ceil(n/2). Works for mixed edge sizes.

    Returns:
        Fraction : Exact expectation

    """

    n = h.n
    a, b = n // 2, n - n // 2
    total = comb(n, a)
    by_size = Counter()
    for edge, mult in h.items():
        by_size[len(edge)] += mult

    out = Fraction(0)
    for k, mult in by_size.items():
        uncut = Fraction(comb(n - k, a - k) + comb(n - k, b - k), total)
        out += mult * (1 - uncut)
    return out


def with_baselines(c: CutResult, h) -> CutResult:
    """Fill in advantage s(H) and the random-bisection baseline"""

    return replace(
        c,
        advantage=asymptotic_baseline(h) - c.cross,
        baseline=random_bisection_expectation(h),
    )


def bisect(
    h,
    trials: int = 200,
    alpha: float = 0.05,
    seed: int = 0,
    mode: str = GREEDY,
    threads: int | None = None,
) -> CutResult:
    """
    Best-of-trials rounding followed by balancing

    The kept rounding has the largest objective; among equal objectives
    the smallest trial index wins, so the choice does not depend on how
    trials are scheduled.

    Arguments:
        h (Hypergraph | MixedHypergraph) : Hypergraph to bisect

    Keyword arguments:
        trials (int) : Number of independent roundings, at least 1
        alpha (float) : Embedding constant in (0, 0.1]
        seed (int) : Master seed; trial t uses the stream (seed, t)
        mode (str) : Balancing mode, 'paper' or 'greedy'; greedy also
            refines the balanced cut with pair moves
        threads (int) : Worker threads for the roundings

    Returns:
        CutResult : Equipartition with advantage and baseline filled in

    """

    log = logging.getLogger(__name__)
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    if mode not in MODES:
        raise ValueError(f"unknown balance mode {mode!r}, expected one of {MODES}")
    check_alpha(alpha)

    if h.nedges == 0:
        mask = np.zeros(h.n, dtype=bool)
        mask[: h.n // 2] = True
        log.info("No edges: returning the first-half split")
        return with_baselines(cut_from_mask(h, mask, 0, seed=seed, method=mode), h)

    emb = build_embedding(h, alpha)
    cuts = map_ordered(
        lambda t: hyperplane_round(emb, seed, t),
        range(trials),
        threads,
    )
    best = max(cuts, key=lambda c: (c.objective, -c.trial))
    log.info(
        "Best of %d trials is #%d: objective %d (cross %d, |X|=%d, |Y|=%d)",
        trials, best.trial, best.objective, best.cross, len(best.X), len(best.Y),
    )

    out = balance(best, h, mode=mode, seed=seed)
    if mode == GREEDY:
        out = refine(out, h)
    out = with_baselines(out, h)
    log.info(
        "Bisection size %d, baseline %.4f, advantage %.4f",
        out.cross, float(out.baseline), float(out.advantage),
    )
    return out


def bisect_mixed(h: MixedHypergraph, **kwargs) -> CutResult:
    """
    Bisect a hypergraph with edges of size 2..r

    Same machinery as bisect; the embedding scale uses the maximum edge
    size and the advantage is measured against the per-edge-size baseline.

    """

    if not isinstance(h, MixedHypergraph):
        raise HypergraphError(
            f"bisect_mixed needs a MixedHypergraph, got {type(h).__name__}"
        )
    return bisect(h, **kwargs)
