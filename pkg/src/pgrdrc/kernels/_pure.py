"""Interpreter-only kernels. Same contracts as the compiled ``_fast`` module."""

from __future__ import annotations

import math
from bisect import bisect_left, bisect_right

import numpy as np


def bin_rects(rects, xs, ys, want_area=False):
    """Classify rectangles against a tiled grid.

    Args:
        rects: ``(m, 4)`` integer array of ``x0, y0, x1, y1``.
        xs: Column boundaries, ``cols + 1`` ascending integers.
        ys: Row boundaries, ``rows + 1`` ascending integers.
        want_area: Also accumulate the clipped overlap area per tile.

    Returns:
        ``(buried, intersecting, area)``, each of length ``rows * cols`` in
        row-major order. ``area`` is in squared input units (all zeros when
        ``want_area`` is false).
    """
    xs = [int(v) for v in xs]
    ys = [int(v) for v in ys]
    cols = len(xs) - 1
    rows = len(ys) - 1
    buried = [0] * (rows * cols)
    inter = [0] * (rows * cols)
    area = [0] * (rows * cols)
    xs_hi, xs_lo = xs[1:], xs[:-1]
    ys_hi, ys_lo = ys[1:], ys[:-1]

    for x0, y0, x1, y1 in np.asarray(rects, dtype=np.int64).reshape(-1, 4).tolist():
        # tiles with positive-area overlap: lo[k] < hi_obj and hi[k] > lo_obj
        j0 = bisect_right(xs_hi, x0)
        j1 = bisect_left(xs_lo, x1)
        i0 = bisect_right(ys_hi, y0)
        i1 = bisect_left(ys_lo, y1)
        if j0 >= j1 or i0 >= i1:
            continue
        if (
            j1 - j0 == 1
            and i1 - i0 == 1
            and x0 >= xs[j0]
            and x1 <= xs[j0 + 1]
            and y0 >= ys[i0]
            and y1 <= ys[i0 + 1]
        ):
            g = i0 * cols + j0
            buried[g] += 1
            if want_area:
                area[g] += (x1 - x0) * (y1 - y0)
            continue
        for i in range(i0, i1):
            h = min(y1, ys[i + 1]) - max(y0, ys[i])
            for j in range(j0, j1):
                g = i * cols + j
                inter[g] += 1
                if want_area:
                    area[g] += (min(x1, xs[j + 1]) - max(x0, xs[j])) * h
    return (
        np.array(buried, dtype=np.int64),
        np.array(inter, dtype=np.int64),
        np.array(area, dtype=np.int64),
    )


def gaussian_log_density(z, mu, sigma2):
    """Row sums of per-feature Gaussian log-pdfs for an ``(n, d)`` matrix."""
    z = np.asarray(z, dtype=np.float64)
    mu = np.asarray(mu, dtype=np.float64)
    sigma2 = np.asarray(sigma2, dtype=np.float64)
    norm = -0.5 * np.log(2.0 * math.pi * sigma2)
    terms = norm - (z - mu) ** 2 / (2.0 * sigma2)
    out = np.zeros(z.shape[0])
    for k in range(z.shape[1]):  # fixed left-to-right order, like the compiled path
        out += terms[:, k]
    return out


def sweep_counts(pos_sorted, neg_sorted, thresholds):
    """For each threshold, count positive and negative scores strictly below it."""
    tp = np.searchsorted(np.asarray(pos_sorted, dtype=np.float64), thresholds, side="left")
    fp = np.searchsorted(np.asarray(neg_sorted, dtype=np.float64), thresholds, side="left")
    return tp.astype(np.int64), fp.astype(np.int64)
