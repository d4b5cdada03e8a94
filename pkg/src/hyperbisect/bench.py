"""
Benchmark sweep over random regular hypergraphs

For every (n, r, d) cell and seed a d-regular instance is generated and
bisected; the record keeps the bisection size, the exact random-bisection
baseline, the advantage s(H) and the empirical constant s(H) / (sqrt(d) n).
Records come back in grid order whatever order the workers finish in.

"""

import json
import logging
import math
import signal
import time
from dataclasses import asdict, dataclass
from threading import Event

import numpy as np

from . import __version__
from .cut import bisect
from .disc import ORACLE_GUARD, oracle_bw
from .errors import HyperbisectError
from .hypergraph import gen_random_regular
from .spectral import hypertree_radius, lambda2_certificate
from .utils import map_ordered

STOP = Event()

OK = 'ok'
CANCELLED = 'cancelled'


def install_signal_handlers() -> None:
    """SIGINT/SIGTERM stop the sweep after the cells already running"""

    signal.signal(signal.SIGINT, lambda *args: STOP.set())
    signal.signal(signal.SIGTERM, lambda *args: STOP.set())


@dataclass
class BenchRecord:
    """One (n, r, d, seed) cell of a sweep"""

    index: int
    n: int
    r: int
    d: int
    seed: int
    trials: int
    alpha: float
    mode: str
    status: str = OK
    nedges: int | None = None
    cross: int | None = None
    baseline: float | None = None
    asymptote: float | None = None
    advantage: float | None = None
    empirical_c: float | None = None
    oracle_bw: int | None = None
    lambda2: float | None = None
    hypertree: float | None = None
    wall: float | None = None
    version: str = __version__

    def to_dict(self, timing: bool = True) -> dict:
        data = asdict(self)
        if not timing:
            data.pop('wall')
        return data


def _run_cell(item, trials, alpha, mode, spectral, timing) -> BenchRecord:
    index, (n, r, d), seed = item
    rec = BenchRecord(index, n, r, d, seed, trials, alpha, mode)
    if STOP.is_set():
        rec.status = CANCELLED
        return rec

    log = logging.getLogger(__name__)
    start = time.perf_counter()
    try:
        h = gen_random_regular(n, r, d, seed=seed)
        res = bisect(h, trials=trials, alpha=alpha, seed=seed, mode=mode, threads=1)
    except HyperbisectError as err:
        log.warning("Cell n=%d r=%d d=%d seed=%d: %s", n, r, d, seed, err)
        rec.status = str(err)
        return rec

    rec.nedges = h.nedges
    rec.cross = res.cross
    rec.baseline = float(res.baseline)
    rec.advantage = float(res.advantage)
    rec.asymptote = float(res.advantage + res.cross)
    rec.empirical_c = rec.advantage / (math.sqrt(d) * n) if d and n else None
    if n <= ORACLE_GUARD:
        rec.oracle_bw = oracle_bw(h, threads=1).cross
    if spectral and h.r >= 2:
        rec.lambda2 = lambda2_certificate(h, p=h.r, seed=seed, threads=1).value
        if d >= 1:
            rec.hypertree = hypertree_radius(r, d)
    if timing:
        rec.wall = time.perf_counter() - start
    log.info(
        "Cell n=%d r=%d d=%d seed=%d: cross %d, s(H) %.3f, c %.4f",
        n, r, d, seed, rec.cross, rec.advantage, rec.empirical_c or 0.0,
    )
    return rec


def bench_sweep(
    cells,
    seeds,
    trials: int = 200,
    alpha: float = 0.05,
    mode: str = 'greedy',
    threads: int | None = None,
    timing: bool = True,
    spectral: bool = False,
) -> list[BenchRecord]:
    """
    Bisect random regular instances over a parameter grid

    Arguments:
        cells (Iterable) : (n, r, d) tuples
        seeds (Iterable[int]) : Seeds run for every cell

    Keyword arguments:
        trials (int) : Rounding trials per instance
        alpha (float) : Embedding constant
        mode (str) : Balancing mode
        threads (int) : Cells run in parallel on this many workers
        timing (bool) : Record wall-clock seconds per cell
        spectral (bool) : Also record a lambda2 certificate at p = r

    Returns:
        list : BenchRecord per (cell, seed), in grid order

    """

    items = [
        (idx, cell, seed)
        for idx, (cell, seed) in enumerate(
            (tuple(cell), int(seed)) for cell in cells for seed in seeds
        )
    ]
    logging.getLogger(__name__).info("Bench sweep over %d instance(s)", len(items))
    return map_ordered(
        lambda item: _run_cell(item, trials, alpha, mode, spectral, timing),
        items,
        threads,
    )


def summarize(records) -> list[dict]:
    """Min and median empirical c per (n, r), over successful records"""

    groups = {}
    for rec in records:
        if rec.status == OK and rec.empirical_c is not None:
            groups.setdefault((rec.n, rec.r), []).append(rec.empirical_c)
    return [
        {
            'n': n,
            'r': r,
            'count': len(vals),
            'min_c': float(np.min(vals)),
            'median_c': float(np.median(vals)),
        }
        for (n, r), vals in sorted(groups.items())
    ]


def write_jsonl(records, fid, timing: bool = True) -> None:
    """One JSON object per line, in record order"""

    for rec in records:
        fid.write(json.dumps(rec.to_dict(timing)) + '\n')
