# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled line-integral weight assembly (Joseph-style interpolation).

Mirrors projector_py.line_integral_triplets: same sampling, same corner
order, same emission order, so both kernels yield identical triplets.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport cos, floor, sin

cnp.import_array()


def line_integral_triplets(int p, cnp.int64_t[::1] pixel_index,
                           double[::1] angles, double[::1] offsets):
    cdef int q = angles.shape[0]
    cdef int d = offsets.shape[0]
    cdef double h = 2.0 / p
    cdef Py_ssize_t cap = <Py_ssize_t> q * d * p * 4
    rows_arr = np.empty(cap, dtype=np.int64)
    cols_arr = np.empty(cap, dtype=np.int64)
    vals_arr = np.empty(cap, dtype=np.float64)
    cdef cnp.int64_t[::1] rows = rows_arr
    cdef cnp.int64_t[::1] cols = cols_arr
    cdef double[::1] vals = vals_arr

    cdef Py_ssize_t n_out = 0
    cdef int ia, jd, i, c
    cdef double cos_a, sin_a, s, t, x, y, gx, gy, fx, fy, w
    cdef cnp.int64_t ix0, iy0, cx, cy, row, col
    cdef double w0, w1, w2, w3
    cdef cnp.int64_t cxs[4]
    cdef cnp.int64_t cys[4]
    cdef double ws[4]

    for ia in range(q):
        cos_a = cos(angles[ia])
        sin_a = sin(angles[ia])
        for jd in range(d):
            s = offsets[jd]
            row = <cnp.int64_t> jd * q + ia
            for i in range(p):
                t = -1.0 + (i + 0.5) * h
                x = s * cos_a - t * sin_a
                y = s * sin_a + t * cos_a
                gx = (x + 1.0) / h - 0.5
                gy = (y + 1.0) / h - 0.5
                ix0 = <cnp.int64_t> floor(gx)
                iy0 = <cnp.int64_t> floor(gy)
                fx = gx - ix0
                fy = gy - iy0
                cxs[0] = ix0
                cxs[1] = ix0 + 1
                cxs[2] = ix0
                cxs[3] = ix0 + 1
                cys[0] = iy0
                cys[1] = iy0
                cys[2] = iy0 + 1
                cys[3] = iy0 + 1
                ws[0] = (1.0 - fx) * (1.0 - fy) * h
                ws[1] = fx * (1.0 - fy) * h
                ws[2] = (1.0 - fx) * fy * h
                ws[3] = fx * fy * h
                for c in range(4):
                    cx = cxs[c]
                    cy = cys[c]
                    w = ws[c]
                    if cx < 0 or cx >= p or cy < 0 or cy >= p:
                        continue
                    col = pixel_index[cy * p + cx]
                    if col < 0 or w <= 0.0:
                        continue
                    rows[n_out] = row
                    cols[n_out] = col
                    vals[n_out] = w
                    n_out += 1
    return rows_arr[:n_out].copy(), cols_arr[:n_out].copy(), vals_arr[:n_out].copy()
