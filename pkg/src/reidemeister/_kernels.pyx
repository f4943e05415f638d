# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled O(M^2) pair scans over sampled closed curves.

Both functions assume the samples are taken at u_k = 2*pi*k/M and that the
polyline closes (segment M-1 joins the last sample to the first).
"""

import numpy as np
cimport numpy as cnp
from libc.math cimport sqrt, sin, fabs, M_PI, INFINITY

cnp.import_array()


def segment_crossings(const double[::1] x, const double[::1] y, int band):
    cdef Py_ssize_t m = x.shape[0]
    cdef Py_ssize_t i, j, gap, i1, j1
    cdef double ax, ay, dx, dy, bx, by, ex, ey, den, wx, wy, s, r
    cdef double xmin_i, xmax_i, ymin_i, ymax_i
    out_i, out_j, out_s, out_r = [], [], [], []
    for i in range(m):
        i1 = i + 1 if i + 1 < m else 0
        ax = x[i]; ay = y[i]
        dx = x[i1] - ax; dy = y[i1] - ay
        xmin_i = ax if dx >= 0 else ax + dx
        xmax_i = ax + dx if dx >= 0 else ax
        ymin_i = ay if dy >= 0 else ay + dy
        ymax_i = ay + dy if dy >= 0 else ay
        for j in range(i + 1, m):
            gap = j - i
            if gap > m - gap:
                gap = m - gap
            if gap < band:
                continue
            j1 = j + 1 if j + 1 < m else 0
            bx = x[j]; by = y[j]
            ex = x[j1] - bx; ey = y[j1] - by
            if (bx > xmax_i and bx + ex > xmax_i) or (bx < xmin_i and bx + ex < xmin_i):
                continue
            if (by > ymax_i and by + ey > ymax_i) or (by < ymin_i and by + ey < ymin_i):
                continue
            den = dx * ey - dy * ex
            if den == 0.0:
                continue
            wx = bx - ax; wy = by - ay
            s = (wx * ey - wy * ex) / den
            r = (wx * dy - wy * dx) / den
            if 0.0 <= s < 1.0 and 0.0 <= r < 1.0:
                out_i.append(i); out_j.append(j); out_s.append(s); out_r.append(r)
    return (np.asarray(out_i, dtype=np.intp), np.asarray(out_j, dtype=np.intp),
            np.asarray(out_s, dtype=float), np.asarray(out_r, dtype=float))


def min_pair_ratio(const double[:, ::1] pts):
    cdef Py_ssize_t m = pts.shape[0]
    cdef Py_ssize_t i, j, bi = 0, bj = 1
    cdef double best = INFINITY, d0, d1, d2, chord, val
    cdef double[::1] inv_chord = np.empty(m)
    for i in range(1, m):
        inv_chord[i] = 1.0 / (2.0 * fabs(sin(M_PI * i / m)))
    for i in range(m):
        for j in range(i + 1, m):
            d0 = pts[i, 0] - pts[j, 0]
            d1 = pts[i, 1] - pts[j, 1]
            d2 = pts[i, 2] - pts[j, 2]
            val = (d0 * d0 + d1 * d1 + d2 * d2) * inv_chord[j - i] * inv_chord[j - i]
            if val < best:
                best = val; bi = i; bj = j
    return sqrt(best), bi, bj
