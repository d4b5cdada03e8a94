"""
Small helpers shared across modules

"""

import logging
import os
from collections.abc import Callable, Iterable
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction
from math import comb as _math_comb

import numpy as np

from . import THREADS_ENV


def comb(n: int, k: int) -> int:
    """
    Binomial coefficient that is zero outside 0 <= k <= n

    math.comb raises for negative arguments, while every counting
    formula in this package wants the combinatorial convention.

    """

    if k < 0 or n < 0 or k > n:
        return 0
    return _math_comb(n, k)


def falling(n: int, k: int) -> int:
    """Falling factorial n (n-1) ... (n-k+1)"""

    out = 1
    for j in range(k):
        out *= n - j
    return out


def default_threads() -> int:
    """
    Number of worker threads to use

    Read from the HYPERBISECT_THREADS environment variable, falling
    back to the CPU count.

    """

    val = os.environ.get(THREADS_ENV, '')
    try:
        threads = int(val)
    except ValueError:
        if val != '':
            logging.getLogger(__name__).warning(
                "Ignoring non-integer %s=%r", THREADS_ENV, val,
            )
        threads = os.cpu_count() or 1
    return max(threads, 1)


def map_ordered(
    func: Callable,
    items: Iterable,
    threads: int | None = None,
) -> list:
    """
    Map func over items, possibly in parallel

    Results are always returned in the order of items, so callers can
    reduce them deterministically regardless of which worker finished
    first.

    Arguments:
        func (Callable) : Function of a single item
        items (Iterable) : Work items

    Keyword arguments:
        threads (int) : Worker count; None uses default_threads(), and
            1 runs serially in the calling thread

    Returns:
        list : func(item) for every item, in order

    """

    items = list(items)
    threads = default_threads() if threads is None else threads
    if threads <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(func, items))


def rng_for(seed: int, *keys: int) -> np.random.Generator:
    """
    Random generator for one work item

    The stream depends only on the master seed and the item keys, never on
    the order in which items are scheduled.

    """

    return np.random.default_rng([int(seed), *map(int, keys)])


def as_float(value) -> float | None:
    """Fraction/int/float to float for reports; None passes through"""

    if value is None:
        return None
    return float(value)


def fraction_str(value: Fraction) -> str:
    """Exact rational as 'num/den' (or 'num' when integral)"""

    value = Fraction(value)
    if value.denominator == 1:
        return str(value.numerator)
    return f"{value.numerator}/{value.denominator}"
