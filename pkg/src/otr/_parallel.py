"""Order-preserving parallel map over independent tasks."""

import multiprocessing as mp
import os
from concurrent.futures import ProcessPoolExecutor


def resolve_threads(threads=None):
    if threads is None:
        env = os.environ.get("OTR_THREADS")
        threads = int(env) if env else (os.cpu_count() or 1)
    return max(1, int(threads))


def pmap(fn, items, threads=1):
    """``[fn(x) for x in items]``, optionally spread over worker processes.

    Results come back in input order, so any reduction over them is
    independent of the worker count.
    """
    items = list(items)
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        return [fn(x) for x in items]
    chunk = max(1, len(items) // (4 * threads))
    ctx = mp.get_context("fork") if "fork" in mp.get_all_start_methods() else None
    with ProcessPoolExecutor(max_workers=threads, mp_context=ctx) as ex:
        return list(ex.map(fn, items, chunksize=chunk))
