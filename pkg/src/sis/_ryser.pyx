# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled Gray-code kernel for exact permanents of complex matrices."""

import numpy as np


def permanent_kernel(double complex[:, :] a):
    """Inclusion-exclusion permanent with incremental row-sum updates.

    Column subsets are enumerated in Gray-code order so each step
    touches exactly one column.  Caller guarantees a square matrix with
    n >= 1 and n <= 20 (the subset counter is a 64-bit integer).
    """
    cdef Py_ssize_t n = a.shape[0]
    cdef Py_ssize_t i, j
    cdef unsigned long long k, top, gray
    cdef double complex total = 0
    cdef double complex prod
    cdef double complex[::1] rowsum = np.zeros(n, dtype=np.complex128)

    top = 1ULL << n
    for k in range(1, top):
        j = 0
        while not (k >> j) & 1:
            j += 1
        gray = k ^ (k >> 1)
        if (gray >> j) & 1:
            for i in range(n):
                rowsum[i] = rowsum[i] + a[i, j]
        else:
            for i in range(n):
                rowsum[i] = rowsum[i] - a[i, j]
        prod = 1
        for i in range(n):
            prod = prod * rowsum[i]
        if k & 1:
            total = total - prod
        else:
            total = total + prod
    if n & 1:
        return -total
    return total
