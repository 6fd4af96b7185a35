"""Plug-in entropy / mutual-information estimates from discrete samples."""

from __future__ import annotations

import numpy as np


def entropy_mm(labels) -> float:
    """Plug-in Shannon entropy (bits) with the Miller-Madow bias correction.

    The correction adds (m - 1) / (2 N ln 2), m being the number of occupied bins.
    """
    labels = np.asarray(labels)
    n = labels.shape[0]
    if n == 0:
        raise ValueError("no samples")
    _, counts = np.unique(labels, return_counts=True, axis=0)
    p = counts / n
    h = -np.sum(p * np.log2(p))
    return float(h + (counts.size - 1) / (2 * n * np.log(2)))


def mutual_info_mm(x, y, n_x: int | None = None, n_y: int | None = None) -> float:
    """I(X;Y) = H(X) + H(Y) - H(X,Y), each term Miller-Madow corrected.

    If the alphabet sizes are given the estimate is clipped to
    [0, log2 min(n_x, n_y)], the range any true mutual information lies in.
    """
    x = np.asarray(x)
    y = np.asarray(y)
    if x.shape != y.shape:
        raise ValueError("x and y must have the same number of samples")
    joint = np.stack([x, y], axis=1)
    mi = entropy_mm(x) + entropy_mm(y) - entropy_mm(joint)
    if n_x is not None and n_y is not None:
        mi = float(np.clip(mi, 0.0, np.log2(min(n_x, n_y))))
    return mi


def batch_standard_error(x, y, n_batches: int = 10, **kw) -> float:
    """Standard error of the MI estimate from equal contiguous batch splits."""
    xs = np.array_split(np.asarray(x), n_batches)
    ys = np.array_split(np.asarray(y), n_batches)
    vals = np.array([mutual_info_mm(a, b, **kw) for a, b in zip(xs, ys)])
    return float(vals.std(ddof=1) / np.sqrt(n_batches))
