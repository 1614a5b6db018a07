"""Order statistics and the weighted aggregate of the k largest risks.

The aggregate of one draw is L = sum_{i=1..k} c_i x_(i) with x_(1) >= ... >=
x_(n) the descending order statistics.  Bulk sampling goes through the
selected kernel backend (compiled or numpy); batches are sized so the
intermediate (batch, n) matrices stay small while the random stream layout
stays fixed for a given scenario.
"""

from __future__ import annotations

import numpy as np

from . import kernels
from .dependence import Scenario, sample_risks
from .errors import DomainError
from .weights import sample_weights

__all__ = ["order_stats", "lc", "sample_lc", "iter_lc_batches"]


def order_stats(x):
    """Descending order statistics of a vector of positive reals."""
    arr = np.asarray(x, dtype=float)
    if arr.ndim != 1 or arr.size == 0:
        raise DomainError("order_stats requires a nonempty vector")
    if np.any(arr <= 0.0) or not np.all(np.isfinite(arr)):
        raise DomainError("order_stats requires strictly positive finite entries")
    return np.sort(arr)[::-1].copy()


def lc(x_desc, c, k=None):
    """Weighted sum of the k largest entries: sum_i c_i x_(i).

    Args:
        x_desc: descending order statistics, as produced by ``order_stats``.
        c: weight vector of length k (negative entries are allowed here even
            though the shipped weight laws are nonnegative).
        k: number of retained order statistics; defaults to len(c).
    """
    x_desc = np.asarray(x_desc, dtype=float)
    c = np.asarray(c, dtype=float)
    if k is None:
        k = c.size
    if k != c.size:
        raise DomainError(f"k={k} does not match len(c)={c.size}")
    if k > x_desc.size or k < 1:
        raise DomainError(f"k must satisfy 1 <= k <= n={x_desc.size}, got {k}")
    acc = c[0] * x_desc[0]
    for i in range(1, k):
        acc += c[i] * x_desc[i]
    return float(acc)


def _batch_size(n):
    """Replicates per block: keeps (batch, n) matrices around ~5-10 MB.

    Part of the reproducibility contract — the stream layout depends on
    the scenario only through n, never on user-facing batching choices.
    """
    return max(4096, 655_360 // max(n, 5))


def iter_lc_batches(scenario: Scenario, gen, count):
    """Yield blocks of aggregate samples, consuming ``gen`` deterministically.

    Per block the draw order is fixed: risks first (one normal block), then
    the weight components in index order.
    """
    block = _batch_size(scenario.n)
    done = 0
    while done < count:
        m = min(block, count - done)
        x = sample_risks(scenario, gen, m)
        c = sample_weights(scenario.weights, gen, m)
        yield kernels.weighted_topk_sums(x, c)
        done += m


def sample_lc(scenario: Scenario, gen, count):
    """``count`` i.i.d. realizations of the weighted aggregate L."""
    if count < 1:
        raise DomainError(f"sample count must be >= 1, got {count}")
    return np.concatenate(list(iter_lc_batches(scenario, gen, count)))
