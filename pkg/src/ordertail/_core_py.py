"""Pure-numpy fallback for the per-replicate aggregation kernels.

The arithmetic is ordered exactly like the compiled version (descending
selection of the k largest entries, then a left-to-right weighted
accumulation), so both backends produce bit-identical float64 results.
"""

import numpy as np

BACKEND = "python"


def topk_desc(x, k):
    """Per-row k largest entries of ``x`` in descending order.

    Args:
        x: (N, n) float64 array.
        k: number of entries to keep, 1 <= k <= n.

    Returns:
        (N, k) float64 array.
    """
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("x must be 2-dimensional")
    n = x.shape[1]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    return np.sort(x, axis=1)[:, ::-1][:, :k]


def weighted_sums(xs, c):
    """Row-wise weighted sums sum_j c[i, j] * xs[i, j], accumulated left to right."""
    xs = np.asarray(xs, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    if xs.shape != c.shape or xs.ndim != 2:
        raise ValueError("xs and c must be 2-d arrays of identical shape")
    acc = xs[:, 0] * c[:, 0]
    for j in range(1, xs.shape[1]):
        acc += xs[:, j] * c[:, j]
    return acc


def weighted_topk_sums(x, c):
    """Fused kernel: weighted sum of the k largest entries per row.

    Equivalent to ``weighted_sums(topk_desc(x, c.shape[1]), c)``.
    """
    c = np.asarray(c, dtype=np.float64)
    return weighted_sums(topk_desc(x, c.shape[1]), c)
