# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled census kernel.  Same contract as ``_pycensus.census_histogram``."""
import numpy as np
cimport numpy as cnp
from libc.stdint cimport int64_t

cnp.import_array()

DEF NUM_CODES = 32768


cdef inline bint _member(const int64_t* keys, Py_ssize_t n, int64_t key) noexcept nogil:
    cdef Py_ssize_t lo = 0, hi = n, mid
    while lo < hi:
        mid = (lo + hi) >> 1
        if keys[mid] < key:
            lo = mid + 1
        else:
            hi = mid
    return lo < n and keys[lo] == key


cdef inline int _sign(int64_t v) noexcept nogil:
    return (v > 0) - (v < 0)


cdef void _walk(int64_t lx, int64_t ly, int64_t tx, int64_t ty, int64_t rx, int64_t ry,
                int remaining, const int64_t* keys, Py_ssize_t nkeys,
                const int64_t* deltas, int64_t stride, int64_t bias,
                int64_t* hist) noexcept nogil:
    cdef int64_t key, ax, ay, bx, by
    cdef int orient, i, code
    if remaining > 0:
        bx = (tx + lx - ly + ty) >> 1
        by = (ty + ly + lx - tx) >> 1
        _walk(tx, ty, bx, by, lx, ly, remaining - 1, keys, nkeys, deltas, stride, bias, hist)
        ax = (rx + tx - ty + ry) >> 1
        ay = (ry + ty + tx - rx) >> 1
        _walk(rx, ry, ax, ay, tx, ty, remaining - 1, keys, nkeys, deltas, stride, bias, hist)
        return
    key = (lx + tx + rx + bias) * stride + (ly + ty + ry + bias)
    orient = (_sign(rx - lx) + 1) * 3 + _sign(ry - ly) + 1
    code = 0
    for i in range(15):
        if _member(keys, nkeys, key + deltas[orient * 15 + i]):
            code |= 1 << i
    hist[code] += 1


def census_histogram(roots, int depth, occupied, deltas, int64_t stride, int64_t bias):
    cdef int64_t[:, ::1] r = np.ascontiguousarray(roots, dtype=np.int64)
    cdef int64_t[::1] keys = np.ascontiguousarray(occupied, dtype=np.int64)
    cdef int64_t[::1] dl = np.ascontiguousarray(deltas, dtype=np.int64).ravel()
    out = np.zeros(NUM_CODES, dtype=np.int64)
    cdef int64_t[::1] hist = out
    cdef Py_ssize_t i, nkeys = keys.shape[0]
    cdef const int64_t* kp = &keys[0] if nkeys > 0 else NULL
    with nogil:
        for i in range(r.shape[0]):
            _walk(r[i, 0], r[i, 1], r[i, 2], r[i, 3], r[i, 4], r[i, 5], depth,
                  kp, nkeys, &dl[0], stride, bias, &hist[0])
    return out
