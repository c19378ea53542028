"""Order-preserving worker pool.

Work items are independent; results always come back in input order and
every reduction downstream runs over that order, so the thread count
never changes a floating-point sum.
"""

import os
from concurrent.futures import ThreadPoolExecutor

_threads = None


def get_threads():
    if _threads is not None:
        return _threads
    try:
        return max(1, int(os.environ.get("MULSPACE_THREADS", "1")))
    except ValueError:
        return 1


def set_threads(n):
    global _threads
    _threads = None if n is None else max(1, int(n))


def ordered_map(fn, items, threads=None):
    items = list(items)
    n = get_threads() if threads is None else threads
    if n <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=n) as pool:
        return list(pool.map(fn, items))
