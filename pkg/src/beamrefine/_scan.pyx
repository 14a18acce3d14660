# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled exhaustive-scan kernel.

Walks the flat codeword index space with an odometer over per-antenna
configuration digits, reusing prefix sums of the per-antenna product
tables. Summation order (antenna 0 upward) and the re*re + im*im
magnitude match the numpy fallback bit for bit; the extension is built
with -ffp-contract=off so the compiler cannot fuse those operations.
"""

import numpy as np


def scan_range(double[:, ::1] tre, double[:, ::1] tim, start, stop):
    """Best squared inner-product magnitude over flat indices [start, stop).

    Returns (best_mag2, best_flat_index); (-1.0, -1) on an empty range.
    Ties keep the lowest flat index.
    """
    cdef Py_ssize_t n_ant = tre.shape[0]
    cdef Py_ssize_t n_cfg = tre.shape[1]
    cdef long long c_start = start
    cdef long long count = <long long> stop - c_start
    if count <= 0:
        return (-1.0, -1)

    dig_arr = np.zeros(n_ant, dtype=np.int64)
    sre_arr = np.zeros(n_ant, dtype=np.float64)
    sim_arr = np.zeros(n_ant, dtype=np.float64)
    cdef long long[::1] dig = dig_arr
    cdef double[::1] sre = sre_arr
    cdef double[::1] sim = sim_arr

    cdef long long rem = c_start
    cdef Py_ssize_t i, j
    for i in range(n_ant - 1, -1, -1):
        dig[i] = rem % n_cfg
        rem //= n_cfg

    cdef double best = -1.0
    cdef long long best_idx = -1
    cdef long long k
    cdef double m

    with nogil:
        sre[0] = tre[0, dig[0]]
        sim[0] = tim[0, dig[0]]
        for i in range(1, n_ant):
            sre[i] = sre[i - 1] + tre[i, dig[i]]
            sim[i] = sim[i - 1] + tim[i, dig[i]]
        for k in range(count):
            m = sre[n_ant - 1] * sre[n_ant - 1] + sim[n_ant - 1] * sim[n_ant - 1]
            if m > best:
                best = m
                best_idx = c_start + k
            if k + 1 < count:
                j = n_ant - 1
                while dig[j] == n_cfg - 1 and j > 0:
                    dig[j] = 0
                    j -= 1
                dig[j] += 1
                for i in range(j, n_ant):
                    if i == 0:
                        sre[0] = tre[0, dig[0]]
                        sim[0] = tim[0, dig[0]]
                    else:
                        sre[i] = sre[i - 1] + tre[i, dig[i]]
                        sim[i] = sim[i - 1] + tim[i, dig[i]]

    return (best, int(best_idx))
