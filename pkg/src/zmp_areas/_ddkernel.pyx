# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled double-description inner step.

Same contract and output order as _ddkernel_py.combine_adjacent; the pair
loop, tight-set intersection and rank elimination run in C.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

BACKEND = "compiled"


cdef bint _rank_at_least(double[:, ::1] rows, Py_ssize_t[::1] idx, Py_ssize_t cnt,
                         Py_ssize_t d, int need, double pivtol,
                         double[:, ::1] work) noexcept:
    cdef Py_ssize_t i, j, col, piv, r
    cdef double gmax, thresh, val, factor, best
    if need <= 0:
        return True
    if cnt < need or d < need:
        return False
    gmax = 0.0
    for i in range(cnt):
        for j in range(d):
            val = rows[idx[i], j]
            work[i, j] = val
            if val < 0.0:
                val = -val
            if val > gmax:
                gmax = val
    if gmax == 0.0:
        return False
    thresh = pivtol * gmax
    r = 0
    for col in range(d):
        if r + (d - col) < need:
            return False
        piv = r
        best = work[r, col] if work[r, col] >= 0.0 else -work[r, col]
        for i in range(r + 1, cnt):
            val = work[i, col] if work[i, col] >= 0.0 else -work[i, col]
            if val > best:
                best = val
                piv = i
        if best <= thresh:
            continue
        if piv != r:
            for j in range(col, d):
                val = work[r, j]
                work[r, j] = work[piv, j]
                work[piv, j] = val
        for i in range(r + 1, cnt):
            factor = work[i, col] / work[r, col]
            for j in range(col, d):
                work[i, j] -= factor * work[r, j]
        r += 1
        if r >= need:
            return True
    return r >= need


def combine_adjacent(double[:, ::1] rays, double[::1] s,
                     const unsigned char[:, ::1] tight, double[:, ::1] rows,
                     Py_ssize_t[::1] pos, Py_ssize_t[::1] neg,
                     int need, double pivtol):
    """Combine adjacent (positive, negative) ray pairs across a new hyperplane."""
    cdef Py_ssize_t k = rays.shape[0]
    cdef Py_ssize_t d = rays.shape[1]
    cdef Py_ssize_t m = tight.shape[1]
    cdef Py_ssize_t npos = pos.shape[0]
    cdef Py_ssize_t nneg = neg.shape[0]
    cdef Py_ssize_t ip, iq, j, cnt, p, q
    if npos == 0 or nneg == 0:
        return np.zeros((0, d))
    cdef cnp.ndarray cbuf_arr = np.empty(m if m else 1, dtype=np.intp)
    cdef Py_ssize_t[::1] cbuf = cbuf_arr
    cdef cnp.ndarray work_arr = np.empty((m if m else 1, d), dtype=np.float64)
    cdef double[:, ::1] work = work_arr
    out = []
    cdef cnp.ndarray row_arr
    cdef double[::1] row
    cdef double sp, sq
    for ip in range(npos):
        p = pos[ip]
        sp = s[p]
        for iq in range(nneg):
            q = neg[iq]
            cnt = 0
            for j in range(m):
                if tight[p, j] and tight[q, j]:
                    cbuf[cnt] = j
                    cnt += 1
            if cnt < need:
                continue
            if not _rank_at_least(rows, cbuf, cnt, d, need, pivtol, work):
                continue
            sq = s[q]
            row_arr = np.empty(d, dtype=np.float64)
            row = row_arr
            for j in range(d):
                row[j] = sp * rays[q, j] - sq * rays[p, j]
            out.append(row_arr)
    if not out:
        return np.zeros((0, d))
    return np.array(out)
