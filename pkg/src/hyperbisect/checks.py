"""
Named identity suites

Each check builds seeded random instances, evaluates an exact identity or
inequality in rational arithmetic and returns a CheckResult. The suites
are what `hyperbisect check` runs; tests call them directly as well.

"""

import logging
from dataclasses import dataclass
from fractions import Fraction

from . import disc
from .hypergraph import Hypergraph, complement, gen_random_binomial, shadow
from .utils import comb, rng_for

CHECKS = {}
CHAIN_N = 14
DISC_N = 16
BETA_REST = 10
SAMPLES = 10


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ''


def register(name: str):
    def wrapper(func):
        CHECKS[name] = func
        return func
    return wrapper


def _instance(n: int, seed: int, r: int = 3, p: float = 0.3) -> Hypergraph:
    return gen_random_binomial(n, r, p, seed=seed)


def _random_set(rng, pool, size: int) -> tuple[int, ...]:
    pool = list(pool)
    size = max(0, min(size, len(pool)))
    if size == 0:
        return ()
    return tuple(sorted(int(v) for v in rng.choice(pool, size, replace=False)))


@register('split')
def check_split_sum(n: int, seed: int) -> CheckResult:
    """Split discrepancies of a bipartition sum to zero"""

    h = _instance(n, seed)
    rng = rng_for(seed, 1)
    for _ in range(SAMPLES):
        U = _random_set(rng, range(n), int(rng.integers(0, n + 1)))
        rest = set(range(n)) - set(U)
        total = sum(disc.split_profile(h, U, rest), Fraction(0))
        if total != 0:
            return CheckResult('split', False, f"sum {total} for U={U}")
    return CheckResult('split', True, f"{SAMPLES} bipartitions")


@register('union')
def check_union(n: int, seed: int) -> CheckResult:
    """disc(U u U') equals the sum of split discrepancies of (U, U')"""

    h = _instance(n, seed)
    rng = rng_for(seed, 2)
    for _ in range(SAMPLES):
        U = _random_set(rng, range(n), n // 3)
        rest = [v for v in range(n) if v not in set(U)]
        W = _random_set(rng, rest, n // 3)
        lhs = disc.disc_of(h, set(U) | set(W))
        rhs = sum(disc.split_profile(h, U, W), Fraction(0))
        if lhs != rhs:
            return CheckResult('union', False, f"{lhs} != {rhs} for U={U}, U'={W}")
    return CheckResult('union', True, f"{SAMPLES} disjoint pairs")


@register('boundary')
def check_boundary(n: int, seed: int) -> CheckResult:
    """Direct boundary count equals the sum over split counts"""

    h = _instance(n, seed)
    rng = rng_for(seed, 3)
    for _ in range(SAMPLES):
        X = _random_set(rng, range(n), int(rng.integers(0, n + 1)))
        a, b = disc.boundary(h, X), disc.boundary_by_splits(h, X)
        if a != b:
            return CheckResult('boundary', False, f"{a} != {b} for X={X}")
    return CheckResult('boundary', True, f"{SAMPLES} sets")


@register('shadow')
def check_shadow(n: int, seed: int) -> CheckResult:
    """Shadow edge and discrepancy decompositions, density window"""

    h = _instance(n, seed, r=4, p=0.2)
    rng = rng_for(seed, 4)
    for _ in range(SAMPLES):
        U = _random_set(rng, range(n), int(rng.integers(0, n + 1)))
        for t in range(2, h.r + 1):
            rep = disc.shadow_decomposition_check(h, U, t)
            if not rep.passed:
                return CheckResult('shadow', False, f"t={t}, U={U}: {rep}")
    return CheckResult('shadow', True, f"{SAMPLES} sets, t=2..{h.r}")


@register('ratio')
def check_ratio(n: int, seed: int) -> CheckResult:
    """p_{t+1} / p_t = (r-t)/(n-t) and nested shadow multiplicities"""

    h = _instance(n, seed, r=4, p=0.2)
    r = h.r
    if h.nedges == 0:
        return CheckResult('ratio', True, 'empty instance')

    dens = {}
    for t in range(2, r + 1):
        shad = shadow(h, t)
        if shad.nedges != h.nedges * comb(r, t):
            return CheckResult('ratio', False, f"e(H_{t}) != e(H) C({r}, {t})")
        dens[t] = Fraction(shad.nedges, comb(n, t))
    for t in range(2, r):
        if dens[t + 1] / dens[t] != Fraction(r - t, n - t):
            return CheckResult('ratio', False, f"ratio at t={t}")

    for t in range(3, r + 1):
        for s in range(2, t):
            nested = shadow(shadow(h, t), s)
            direct = shadow(h, s)
            scale = comb(r - s, t - s)
            want = {e: m * scale for e, m in direct.items()}
            if dict(nested.items()) != want:
                return CheckResult('ratio', False, f"nested shadow t={t}, s={s}")
    return CheckResult('ratio', True, f"t=2..{r}")


@register('beta')
def check_beta(n: int, seed: int) -> CheckResult:
    """Mean split discrepancy over random b-subsets equals beta_i times the full one"""

    h = _instance(n, seed)
    rng = rng_for(seed, 5)
    X = _random_set(rng, range(n), max(1, n - BETA_REST))
    rest = n - len(X)
    expected, predicted = disc.split_expectation_exact(h, X, rest // 2)
    if expected != predicted:
        return CheckResult('beta', False, f"{expected} != {predicted}")
    return CheckResult('beta', True, f"|X|={len(X)}, |X^c|={rest}")


@register('poly')
def check_poly(n: int, seed: int) -> CheckResult:
    """E disc(Z u Y) equals the split polynomial at 21 grid points"""

    h = _instance(n, seed)
    rng = rng_for(seed, 6)
    X = _random_set(rng, range(n), min(n // 2, disc.POLY_GUARD))
    rest = [v for v in range(n) if v not in set(X)]
    Y = _random_set(rng, rest, len(rest) // 2)
    rep = disc.poly_identity_check(h, X, Y)
    if not rep.passed:
        bad = [q for q, lhs, rhs in rep.points if lhs != rhs]
        return CheckResult('poly', False, f"mismatch at q={bad}")
    return CheckResult('poly', True, f"|X|={len(X)}, |Y|={len(Y)}")


@register('bound')
def check_bound(n: int, seed: int) -> CheckResult:
    """|disc_{i, r-i}(X, Y)| <= r^(2r) disc(H) for exhaustively solved H"""

    m = min(n, DISC_N)
    h = _instance(m, seed)
    D = disc.disc_exact(h).disc
    limit = h.r ** (2 * h.r) * D
    rng = rng_for(seed, 7)
    for _ in range(SAMPLES):
        X = _random_set(rng, range(m), m // 2)
        rest = [v for v in range(m) if v not in set(X)]
        Y = _random_set(rng, rest, int(rng.integers(0, len(rest) + 1)))
        worst = max(abs(val) for val in disc.split_profile(h, X, Y))
        if worst > limit:
            return CheckResult('bound', False, f"{worst} > {limit}")
    return CheckResult('bound', True, f"disc(H)={D}")


@register('binomial')
def check_binomial(n: int, seed: int) -> CheckResult:
    """C(floor(m/2), r) + C(ceil(m/2), r) <= 2^(1-r) C(m, r) for r <= m <= 64"""

    for m in range(2, 65):
        for r in range(2, m + 1):
            if not disc.binomial_inequality(m, r):
                return CheckResult('binomial', False, f"m={m}, r={r}")
    return CheckResult('binomial', True, '2 <= r <= m <= 64')


@register('chain')
def check_chain(n: int, seed: int) -> CheckResult:
    """disc(X) + disc(Y) >= s(H) and disc+ >= s(H)/2 with the exact bisection"""

    h = _instance(min(n, CHAIN_N), seed)
    rep = disc.lemma_chain(h)
    return CheckResult(
        'chain', rep.ok, f"s={rep.advantage}, parts={rep.parts_disc}, disc+={rep.disc_plus}",
    )


@register('complement')
def check_complement(n: int, seed: int) -> CheckResult:
    """disc+(G) = disc-(complement of G) for graphs"""

    m = min(n, 8)
    h = gen_random_binomial(m, 2, 0.5, seed=seed)
    a = disc.disc_exact(h).disc_plus
    b = disc.disc_exact(complement(h)).disc_minus
    return CheckResult('complement', a == b, f"{a} vs {b}")


def run_checks(names=None, n: int = 12, seed: int = 0) -> list[CheckResult]:
    """
    Run the named suites, all of them by default

    Arguments:
        names (Iterable[str]) : Suite names from CHECKS

    Keyword arguments:
        n (int) : Vertex count of the random instances
        seed (int) : Master seed

    Returns:
        list : CheckResult per suite, in registry order

    """

    log = logging.getLogger(__name__)
    names = list(CHECKS) if not names else list(names)
    unknown = [name for name in names if name not in CHECKS]
    if unknown:
        raise KeyError(f"unknown check(s): {', '.join(unknown)}")

    results = []
    for name in names:
        res = CHECKS[name](n, seed)
        log.log(
            logging.INFO if res.passed else logging.ERROR,
            "check %s: %s %s", name, 'ok' if res.passed else 'FAILED', res.detail,
        )
        results.append(res)
    return results
