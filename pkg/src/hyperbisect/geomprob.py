"""
Probability that r vectors lie in a random linear half-space

mu(v_1, ..., v_r) = P(<w, v_i> >= 0 for every i) for a uniformly random
direction w. Exact for r = 2, Monte-Carlo otherwise. Only the Gram matrix
matters, so vectors are first reduced to a lower-triangular r x r frame.

"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GeometryError
from .utils import map_ordered, rng_for

UNIT_TOL = 1e-9
PIVOT_TOL = 1e-12
CHUNK = 2**18
ALPHA_TEST = 0.05


@dataclass(frozen=True)
class VectorTuple:
    """
    r unit vectors stored as the rows of a dense array

    Arguments:
        vectors (ndarray) : Shape (r, m)

    Keyword arguments:
        tol (float) : Allowed deviation of each norm from 1

    """

    vectors: np.ndarray
    tol: float = UNIT_TOL

    def __post_init__(self):
        vecs = np.atleast_2d(np.asarray(self.vectors, dtype=float))
        norms = np.linalg.norm(vecs, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > self.tol)
        if bad.size:
            raise GeometryError(
                f"vector {int(bad[0])} has norm {norms[bad[0]]:.12g}, expected 1"
            )
        vecs.setflags(write=False)
        object.__setattr__(self, 'vectors', vecs)

    @property
    def r(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def gram(self) -> np.ndarray:
        return self.vectors @ self.vectors.T

    @property
    def max_product(self) -> float:
        """a = largest pairwise inner product"""

        gram = self.gram
        if self.r < 2:
            return 0.0
        return float(gram[np.triu_indices(self.r, 1)].max())

    @property
    def pair_sum(self) -> float:
        """Sum of <v_i, v_j> over i < j"""

        return float(self.gram[np.triu_indices(self.r, 1)].sum())

    @classmethod
    def from_gram(cls, gram, tol: float = UNIT_TOL) -> 'VectorTuple':
        """Lower-triangular vectors realizing a unit-diagonal Gram matrix"""

        return cls(_cholesky_rows(np.asarray(gram, dtype=float)), tol)

    @classmethod
    def orthonormal(cls, r: int, dim: int | None = None) -> 'VectorTuple':
        return cls(np.eye(r, dim or r))

    @classmethod
    def from_angle(cls, angle: float) -> 'VectorTuple':
        """Two unit vectors in the plane separated by angle radians"""

        return cls(
            np.array([[1.0, 0.0], [math.cos(angle), math.sin(angle)]])
        )


@dataclass(frozen=True)
class MuEstimate:
    """Monte-Carlo estimate of mu with its standard error"""

    mu: float
    trials: int
    seed: int
    hits: int = 0

    @property
    def stderr(self) -> float:
        return math.sqrt(self.mu * (1.0 - self.mu) / self.trials)

    def within(self, value: float, sigmas: float = 4.0) -> bool:
        """True when value is inside mu +/- sigmas standard errors"""

        # A zero standard error (all or no hits) still allows 1/T slack
        slack = max(sigmas * self.stderr, 1.0 / self.trials)
        return abs(self.mu - value) <= slack


@dataclass(frozen=True)
class BracketReport:
    """Empirical bracket of (mu - 2^-r) / sum_{i<j} <v_i, v_j>"""

    r: int
    alpha_test: float
    trials: int
    ratios: tuple[float, ...]
    excluded: int
    lower: float
    upper: float
    ok: bool


@dataclass(frozen=True)
class ClaimReport:
    """Entry bounds of the reduced frame when pairwise products are small"""

    a: float
    applicable: bool
    diagonal_min: float
    offdiag_min: float
    offdiag_max: float
    ok: bool
    notes: tuple[str, ...] = field(default_factory=tuple)


def _cholesky_rows(gram: np.ndarray) -> np.ndarray:
    """
    Cholesky-style factor of a PSD matrix with clamped pivots

    Row i of the result is a vector in R^r whose inner products with the
    other rows reproduce gram; entries right of the diagonal are zero and
    the diagonal is nonnegative. Pivots below PIVOT_TOL (relative to the
    row norm) are set to zero so rank-deficient Grams factor cleanly.

    """

    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise GeometryError(f"Gram matrix must be square, got {gram.shape}")

    r = gram.shape[0]
    rows = np.zeros((r, r))
    for i in range(r):
        for j in range(i):
            pivot = rows[j, j]
            if pivot > 0.0:
                rows[i, j] = (gram[i, j] - rows[i, :j] @ rows[j, :j]) / pivot
        resid = gram[i, i] - rows[i, :i] @ rows[i, :i]
        scale = math.sqrt(max(gram[i, i], 0.0))
        if resid <= (PIVOT_TOL * scale) ** 2 or resid <= 0.0:
            rows[i, i] = 0.0
        else:
            rows[i, i] = math.sqrt(resid)
    return rows


def reduce_to_r_dims(vs: VectorTuple) -> VectorTuple:
    """
    Same Gram matrix, dimension r, lower-triangular rows

    mu only depends on the Gram matrix, so the estimate is unchanged by
    this reduction.

    """

    return VectorTuple(_cholesky_rows(vs.gram), vs.tol)


def mu_exact_r2(angle: float) -> float:
    """
    Exact mu for two vectors at the given angle

    Arguments:
        angle (float) : Angle in radians, 0 <= angle <= pi

    Returns:
        float : (pi - angle) / (2 pi)

    """

    if not 0.0 <= angle <= math.pi:
        raise GeometryError(f"angle must be in [0, pi], got {angle}")
    return (math.pi - angle) / (2.0 * math.pi)


def _count_hits(frame: np.ndarray, size: int, seed: int, chunk: int) -> int:
    rng = rng_for(seed, chunk)
    # Only the sign of <w, v> is used, so w need not be normalized
    w = rng.standard_normal((size, frame.shape[1]))
    return int(np.count_nonzero(np.all(w @ frame.T >= 0.0, axis=1)))


def mu_estimate(
    vs: VectorTuple,
    trials: int,
    seed: int = 0,
    threads: int | None = None,
    chunk_size: int = CHUNK,
) -> MuEstimate:
    """
    Monte-Carlo estimate of mu

    Trials are split into chunks, each with its own random stream derived
    from (seed, chunk index), so the estimate does not depend on how chunks
    are scheduled across threads.

    Arguments:
        vs (VectorTuple) : Unit vectors
        trials (int) : Number of random directions, at least 1

    Keyword arguments:
        seed (int) : Master seed
        threads (int) : Worker threads
        chunk_size (int) : Directions per chunk

    Returns:
        MuEstimate

    """

    if trials < 1:
        raise GeometryError(f"trials must be >= 1, got {trials}")

    frame = reduce_to_r_dims(vs).vectors
    sizes = [chunk_size] * (trials // chunk_size)
    if trials % chunk_size:
        sizes.append(trials % chunk_size)

    hits = sum(
        map_ordered(
            lambda item: _count_hits(frame, item[1], seed, item[0]),
            enumerate(sizes),
            threads,
        )
    )
    est = MuEstimate(hits / trials, trials, seed, hits)
    logging.getLogger(__name__).debug(
        "mu estimate r=%d: %.6f +/- %.2g (%d trials)",
        vs.r, est.mu, est.stderr, trials,
    )
    return est


def random_small_gram(
    r: int,
    alpha_test: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Unit-diagonal Gram with off-diagonals drawn from (0, alpha_test]"""

    gram = np.eye(r)
    for i in range(r):
        for j in range(i + 1, r):
            gram[i, j] = gram[j, i] = alpha_test * (1.0 - rng.random())
    return gram


def mu_bracket_check(
    r: int,
    gram_samples: int,
    trials: int,
    seed: int = 0,
    alpha_test: float = ALPHA_TEST,
    threads: int | None = None,
) -> BracketReport:
    """
    Empirical constants of the half-space lemma

    For random Gram matrices with small nonnegative off-diagonal entries,
    estimates mu and records (mu - 2^-r) / sum_{i<j} <v_i, v_j>. The check
    passes when every ratio is positive and finite.

    Arguments:
        r (int) : Number of vectors
        gram_samples (int) : Number of random Gram matrices
        trials (int) : Monte-Carlo trials per Gram matrix

    Keyword arguments:
        seed (int) : Master seed
        alpha_test (float) : Upper end of the off-diagonal range
        threads (int) : Worker threads for each estimate

    Returns:
        BracketReport

    """

    if (r - 1) * alpha_test >= 1.0:
        raise GeometryError(
            f"alpha_test={alpha_test} too large to keep r={r} Grams positive definite"
        )

    rng = rng_for(seed, 0)
    ratios = []
    excluded = 0
    for sample in range(gram_samples):
        vs = VectorTuple.from_gram(random_small_gram(r, alpha_test, rng))
        total = vs.pair_sum
        if total <= 0.0:
            excluded += 1
            continue
        est = mu_estimate(vs, trials, seed=seed + sample + 1, threads=threads)
        ratios.append((est.mu - 2.0 ** -r) / total)

    lower = min(ratios, default=math.nan)
    upper = max(ratios, default=math.nan)
    ok = bool(ratios) and all(
        math.isfinite(val) and val > 0.0 for val in ratios
    )
    logging.getLogger(__name__).info(
        "Bracket r=%d over %d Grams: [%.4f, %.4f] ok=%s",
        r, len(ratios), lower, upper, ok,
    )
    return BracketReport(
        r, alpha_test, trials, tuple(ratios), excluded, lower, upper, ok,
    )


def claim_bounds_check(vs: VectorTuple) -> ClaimReport:
    """
    Entry bounds of the reduced frame

    With all pairwise products in [0, a] and a <= 1/(18 r), every reduced
    vector has diagonal entry >= 1/2 and entries left of the diagonal in
    [-18 r a^2, 3 a]. When the hypothesis does not hold the report is
    marked not applicable and ok is True.

    """

    frame = reduce_to_r_dims(vs).vectors
    r = vs.r
    gram = vs.gram
    offdiag = gram[np.triu_indices(r, 1)] if r > 1 else np.zeros(0)
    a = float(offdiag.max()) if offdiag.size else 0.0
    applicable = bool(
        offdiag.size == 0
        or (offdiag.min() >= -UNIT_TOL and a <= 1.0 / (18 * r))
    )

    lower = frame[np.tril_indices(r, -1)]
    diag_min = float(np.diag(frame).min())
    off_min = float(lower.min()) if lower.size else 0.0
    off_max = float(lower.max()) if lower.size else 0.0

    notes = []
    ok = True
    if applicable:
        if diag_min < 0.5:
            notes.append(f"diagonal entry {diag_min:.6g} < 1/2")
        if off_min < -18 * r * a * a - UNIT_TOL:
            notes.append(f"entry {off_min:.6g} below -18 r a^2")
        if off_max > 3 * a + UNIT_TOL:
            notes.append(f"entry {off_max:.6g} above 3 a")
        ok = not notes

    return ClaimReport(a, applicable, diag_min, off_min, off_max, ok, tuple(notes))
