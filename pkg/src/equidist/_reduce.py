"""Deterministic floating point reduction and ordered parallel map.

Sums are formed by a fixed binary tree: leaves of ``LEAF_SIZE`` values are
added pairwise elementwise, then leaf totals are combined pairwise.  The
tree shape depends only on the input length, so results are bitwise
identical however the work is split across workers.
"""

from concurrent.futures import ThreadPoolExecutor

import numpy as np

LEAF_SIZE = 1024


def _tree(a):
    # a: 2-d array, reduce along axis 1 by repeated halving
    while a.shape[1] > 1:
        if a.shape[1] % 2:
            a = np.concatenate([a, np.zeros((a.shape[0], 1))], axis=1)
        a = a[:, 0::2] + a[:, 1::2]
    return a[:, 0]


def leaf_sums(x):
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    n_leaves = -(-x.size // LEAF_SIZE)
    padded = np.zeros(n_leaves * LEAF_SIZE)
    padded[: x.size] = x
    return _tree(padded.reshape(n_leaves, LEAF_SIZE))


def pairwise_sum(x, jobs=1):
    """Sum ``x`` with the fixed tree; ``jobs`` only changes who does the work."""
    x = np.ascontiguousarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        return 0.0
    if jobs > 1 and x.size > 4 * LEAF_SIZE:
        n_leaves = -(-x.size // LEAF_SIZE)
        per = -(-n_leaves // jobs) * LEAF_SIZE
        chunks = [x[i : i + per] for i in range(0, x.size, per)]
        with ThreadPoolExecutor(jobs) as pool:
            leaves = np.concatenate(list(pool.map(leaf_sums, chunks)))
    else:
        leaves = leaf_sums(x)
    return float(_tree(leaves[None, :])[0])


def pairwise_mean(x, jobs=1):
    x = np.asarray(x)
    return pairwise_sum(x, jobs) / x.size


def ordered_map(fn, items, jobs=1):
    """``list(map(fn, items))``, optionally on a thread pool; order preserved."""
    items = list(items)
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(min(jobs, len(items))) as pool:
        return list(pool.map(fn, items))
