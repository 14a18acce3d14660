"""Pure-numpy exhaustive-scan kernel.

Mirrors the compiled kernel exactly: per-antenna product tables are summed
in antenna order and the squared magnitude is re*re + im*im, so both
backends produce bit-identical (power, index) results. Ties keep the
lowest flat index.
"""

import numpy as np

_BLOCK = 1 << 18


def scan_range(tre, tim, start, stop):
    """Best squared inner-product magnitude over flat indices [start, stop).

    tre/tim hold per-antenna tables T[i][c] = h_i * w(c) split into real and
    imaginary parts, antenna 0 being the most significant flat-index digit.
    Returns (best_mag2, best_flat_index); (-1.0, -1) on an empty range.
    """
    n_ant, n_cfg = tre.shape
    shape = (n_cfg,) * n_ant
    best = -1.0
    best_idx = -1
    a = int(start)
    stop = int(stop)
    while a < stop:
        b = min(a + _BLOCK, stop)
        digs = np.unravel_index(np.arange(a, b, dtype=np.int64), shape)
        acc_re = tre[0][digs[0]].copy()
        acc_im = tim[0][digs[0]].copy()
        for i in range(1, n_ant):
            acc_re += tre[i][digs[i]]
            acc_im += tim[i][digs[i]]
        mag2 = acc_re * acc_re + acc_im * acc_im
        i = int(np.argmax(mag2))
        if float(mag2[i]) > best:
            best = float(mag2[i])
            best_idx = a + i
        a = b
    return best, best_idx
