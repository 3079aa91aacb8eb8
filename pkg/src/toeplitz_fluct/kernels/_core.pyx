# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled trace kernels: banded matrix powers and the balanced lag sum.

Mirrors ``_fallback`` exactly; selected by the dispatcher at import.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()

IMPLEMENTATION = "compiled"


def band_matmul(cnp.ndarray[double, ndim=2] a, int wa,
                cnp.ndarray[double, ndim=2] b, int wb, int n):
    cdef int wc = wa + wb
    cdef cnp.ndarray[double, ndim=2] c = np.zeros((n, 2 * wc + 1))
    cdef int i, e, f, row
    cdef double va
    for i in range(n):
        for e in range(-wa, wa + 1):
            row = i + e
            if row < 0 or row >= n:
                continue
            va = a[i, wa + e]
            if va == 0.0:
                continue
            for f in range(-wb, wb + 1):
                c[i, wc + e + f] += va * b[row, wb + f]
    return c


def band_trace(cnp.ndarray[double, ndim=2] a, int w, int n):
    cdef double t = 0.0
    cdef int i
    for i in range(n):
        t += a[i, w]
    return t


def trace_power_banded(cnp.ndarray[double, ndim=2] band, int w, int n, int p):
    if p == 1:
        return band_trace(band, w, n)
    cdef cnp.ndarray[double, ndim=2] acc = band
    cdef int wacc = w
    cdef int k
    for k in range(p - 1):
        acc = band_matmul(acc, wacc, band, w, n)
        wacc += w
    return band_trace(acc, wacc, n)


def balanced_trace(list coeffs, list widths, int n):
    cdef int p = len(coeffs)
    cdef cnp.ndarray[double, ndim=1] last_c = np.ascontiguousarray(coeffs[p - 1], dtype=np.float64)
    cdef int wlast = widths[p - 1]
    if p == 1:
        return n * last_c[wlast]

    cdef int levels = p - 1
    cdef cnp.ndarray[double, ndim=2] cmat
    cdef cnp.ndarray[int, ndim=1] ws = np.asarray(widths[:levels], dtype=np.intc)
    cdef int wmax = int(max(widths[:levels]))
    cmat = np.zeros((levels, 2 * wmax + 1))
    cdef int l
    for l in range(levels):
        cmat[l, : 2 * ws[l] + 1] = np.asarray(coeffs[l], dtype=np.float64)

    cdef cnp.ndarray[long, ndim=1] idx = np.zeros(levels, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] sums = np.zeros(levels, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] his = np.zeros(levels, dtype=np.int64)
    cdef cnp.ndarray[long, ndim=1] los = np.zeros(levels, dtype=np.int64)
    cdef cnp.ndarray[double, ndim=1] wts = np.ones(levels)

    cdef double total = 0.0
    cdef long s_prev, hi_prev, lo_prev, s, hi, lo, count
    cdef double w_prev, wt
    cdef int level = 0
    cdef long lag

    while True:
        # fill in state for the current level given idx[level]
        l = level
        if l == 0:
            s_prev = 0; hi_prev = 0; lo_prev = 0; w_prev = 1.0
        else:
            s_prev = sums[l - 1]; hi_prev = his[l - 1]
            lo_prev = los[l - 1]; w_prev = wts[l - 1]
        lag = idx[l] - ws[l]
        s = s_prev + lag
        sums[l] = s
        his[l] = s if s > hi_prev else hi_prev
        los[l] = s if s < lo_prev else lo_prev
        wts[l] = w_prev * cmat[l, idx[l]]

        if level == levels - 1:
            # close the tuple with the forced last lag
            if -wlast <= -s <= wlast and wts[l] != 0.0:
                hi = his[l]
                lo = los[l]
                count = n - hi + lo
                if count > 0:
                    total += wts[l] * count * last_c[wlast - s]
            # odometer advance
            while level >= 0:
                idx[level] += 1
                if idx[level] <= 2 * ws[level]:
                    break
                idx[level] = 0
                level -= 1
            if level < 0:
                return total
        else:
            level += 1
