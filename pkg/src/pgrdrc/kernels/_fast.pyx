# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled kernels. Contracts mirror ``pgrdrc.kernels._pure``."""

import numpy as np
cimport numpy as cnp
from libc.math cimport log, M_PI

cnp.import_array()

ctypedef cnp.int64_t i64


cdef inline Py_ssize_t _first_gt(const i64[:] a, Py_ssize_t lo, Py_ssize_t hi, i64 v) nogil:
    # first index k in [lo, hi) with a[k] > v
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] > v:
            hi = mid
        else:
            lo = mid + 1
    return lo


cdef inline Py_ssize_t _first_ge(const i64[:] a, Py_ssize_t lo, Py_ssize_t hi, i64 v) nogil:
    # first index k in [lo, hi) with a[k] >= v
    cdef Py_ssize_t mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if a[mid] >= v:
            hi = mid
        else:
            lo = mid + 1
    return lo


def bin_rects(rects, xs, ys, bint want_area=False):
    cdef const i64[:, :] r = np.ascontiguousarray(rects, dtype=np.int64).reshape(-1, 4)
    cdef const i64[:] bx = np.ascontiguousarray(xs, dtype=np.int64)
    cdef const i64[:] by = np.ascontiguousarray(ys, dtype=np.int64)
    cdef Py_ssize_t cols = bx.shape[0] - 1
    cdef Py_ssize_t rows = by.shape[0] - 1
    buried_a = np.zeros(rows * cols, dtype=np.int64)
    inter_a = np.zeros(rows * cols, dtype=np.int64)
    area_a = np.zeros(rows * cols, dtype=np.int64)
    cdef i64[:] buried = buried_a
    cdef i64[:] inter = inter_a
    cdef i64[:] area = area_a
    cdef Py_ssize_t m = r.shape[0]
    cdef Py_ssize_t k, i, j, i0, i1, j0, j1, g
    cdef i64 x0, y0, x1, y1, h, w

    with nogil:
        for k in range(m):
            x0 = r[k, 0]
            y0 = r[k, 1]
            x1 = r[k, 2]
            y1 = r[k, 3]
            # boundaries bx[1..cols] are tile upper edges, bx[0..cols-1] lower edges
            j0 = _first_gt(bx, 1, cols + 1, x0) - 1
            j1 = _first_ge(bx, 0, cols, x1)
            i0 = _first_gt(by, 1, rows + 1, y0) - 1
            i1 = _first_ge(by, 0, rows, y1)
            if j0 >= j1 or i0 >= i1:
                continue
            if (j1 - j0 == 1 and i1 - i0 == 1
                    and x0 >= bx[j0] and x1 <= bx[j0 + 1]
                    and y0 >= by[i0] and y1 <= by[i0 + 1]):
                g = i0 * cols + j0
                buried[g] += 1
                if want_area:
                    area[g] += (x1 - x0) * (y1 - y0)
                continue
            for i in range(i0, i1):
                h = min(y1, by[i + 1]) - max(y0, by[i])
                for j in range(j0, j1):
                    g = i * cols + j
                    inter[g] += 1
                    if want_area:
                        w = min(x1, bx[j + 1]) - max(x0, bx[j])
                        area[g] += w * h
    return buried_a, inter_a, area_a


def gaussian_log_density(z, mu, sigma2):
    cdef const double[:, :] Z = np.ascontiguousarray(z, dtype=np.float64)
    cdef const double[:] M = np.ascontiguousarray(mu, dtype=np.float64)
    cdef const double[:] S = np.ascontiguousarray(sigma2, dtype=np.float64)
    cdef Py_ssize_t n = Z.shape[0]
    cdef Py_ssize_t d = Z.shape[1]
    out_a = np.empty(n, dtype=np.float64)
    cdef double[:] out = out_a
    norm_a = np.empty(d, dtype=np.float64)
    cdef double[:] norm = norm_a
    cdef Py_ssize_t i, k
    cdef double acc, t

    for k in range(d):
        norm[k] = -0.5 * log(2.0 * M_PI * S[k])
    with nogil:
        for i in range(n):
            acc = 0.0
            for k in range(d):
                t = Z[i, k] - M[k]
                acc += norm[k] - t * t / (2.0 * S[k])
            out[i] = acc
    return out_a


def sweep_counts(pos_sorted, neg_sorted, thresholds):
    cdef const double[:] P = np.ascontiguousarray(pos_sorted, dtype=np.float64)
    cdef const double[:] N = np.ascontiguousarray(neg_sorted, dtype=np.float64)
    cdef const double[:] T = np.ascontiguousarray(thresholds, dtype=np.float64)
    cdef Py_ssize_t nt = T.shape[0]
    tp_a = np.empty(nt, dtype=np.int64)
    fp_a = np.empty(nt, dtype=np.int64)
    cdef i64[:] tp = tp_a
    cdef i64[:] fp = fp_a
    cdef Py_ssize_t a = 0, b = 0, t
    cdef Py_ssize_t np_ = P.shape[0], nn = N.shape[0]

    # thresholds ascending: both cursors only move forward
    with nogil:
        for t in range(nt):
            while a < np_ and P[a] < T[t]:
                a += 1
            while b < nn and N[b] < T[t]:
                b += 1
            tp[t] = a
            fp[t] = b
    return tp_a, fp_a
