"""Received power, maximum-ratio combining, grid quantization, and the
exhaustive oracle.

Received power for a channel h and codeword b is 20*log10 |sum_i h_i b_i|
with the decoded weights b. An exactly zero inner product maps to -inf,
which compares below every finite power, keeping argmax total.

P_max of a channel is realized as the power of the quantized MRC codeword
(the continuous MRC weights rounded onto the grid); the true discrete
optimum is available separately through brute_force_max for small grids.
For phase-only grids the two differ by at most
20*log10(1/cos(pi / phase_levels)) dB.
"""

import math
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import kernels
from .arraymodel import (
    ArrayConfig,
    SteeringVector,
    codebook_size,
    decode,
    steering_from_flat,
)
from .errors import BudgetExceededError, DegenerateChannelError

NEG_INF_DB = float("-inf")


def _channel_vector(h) -> np.ndarray:
    vec = getattr(h, "h", h)
    return np.asarray(vec, dtype=np.complex128)


def power_from_weights(hvec: np.ndarray, w: np.ndarray) -> float:
    """20*log10 |<h, w>| with a -inf sentinel for exact cancellation."""
    inner = np.dot(hvec, w)
    mag = abs(inner)
    if mag == 0.0:
        return NEG_INF_DB
    return 20.0 * math.log10(mag)


def received_power(h, sv: SteeringVector, cfg: ArrayConfig) -> float:
    return power_from_weights(_channel_vector(h), decode(sv, cfg))


def mrc_weights(h) -> np.ndarray:
    """Conjugate weights scaled so the strongest element has amplitude 1."""
    hvec = _channel_vector(h)
    peak = np.abs(hvec).max()
    if peak == 0.0:
        raise DegenerateChannelError("all-zero channel vector")
    return np.conj(hvec) / peak


def nearest_phase_index(angle_rad: float, cfg: ArrayConfig) -> int:
    """Index of the grid phase closest to angle_rad by circular distance.

    The grid is {p * 2*pi / P : p = 1..P}; 0 is identified with 2*pi
    (index P). Ties go to the smaller index.
    """
    P = cfg.phase_levels
    t = float(angle_rad) % (2.0 * math.pi)
    raw = t * P / (2.0 * math.pi)
    k = int(math.floor(raw))
    if k >= P:  # t just below 2*pi can round up
        k = P - 1
    frac = raw - k
    idx_lo = P if k == 0 else k
    idx_hi = P if k + 1 >= P else k + 1
    if frac < 0.5:
        return idx_lo
    if frac > 0.5:
        return idx_hi
    return min(idx_lo, idx_hi)


def nearest_amp_index(magnitude: float, cfg: ArrayConfig) -> int:
    """Index of the grid amplitude closest to the magnitude clamped into
    [1/2**K_amp, 1]. Ties go to the smaller index."""
    A = cfg.amp_levels
    x = min(max(float(magnitude), 1.0 / A), 1.0)
    raw = x * A  # in [1, A]
    k = int(math.floor(raw))
    if k >= A:
        return A
    frac = raw - k
    if frac < 0.5:
        return k
    if frac > 0.5:
        return k + 1
    return k


def quantize_weights(w, cfg: ArrayConfig) -> SteeringVector:
    """Round continuous weights elementwise onto the configuration grid.

    Matching is on decoded values: the chosen phase index p minimizes the
    circular distance between the decoded phase term exp(-1j*p*2*pi/P) and
    the direction of w_i, which is what makes decode and quantize_weights
    inverse to each other on grid points.
    """
    w = np.asarray(w, dtype=np.complex128)
    amp_idx = []
    phase_idx = []
    for z in w:
        amp_idx.append(nearest_amp_index(abs(z), cfg))
        phase_idx.append(nearest_phase_index(-np.angle(z), cfg))
    return SteeringVector(amp_idx=tuple(amp_idx), phase_idx=tuple(phase_idx))


def quantized_mrc(h, cfg: ArrayConfig):
    """Grid-rounded MRC codeword and its received power (the P_max proxy)."""
    sv = quantize_weights(mrc_weights(h), cfg)
    return sv, received_power(h, sv, cfg)


def phase_quantization_bound_db(cfg: ArrayConfig) -> float:
    """Worst-case loss of quantized MRC against any codeword, K_amp = 0.

    Per element the phase error is at most half a grid step, so the
    coherent sum shrinks by at most cos(pi / P).
    """
    return -20.0 * math.log10(math.cos(math.pi / cfg.phase_levels))


def brute_force_max(h, cfg: ArrayConfig, budget: int, threads: int = 1):
    """Exact argmax of received_power over the full codebook.

    Refuses when 2**(N * L**2) exceeds the budget. Ties resolve to the
    lexicographically smallest codeword (lowest flat index) regardless of
    how the scan is partitioned.
    """
    total = codebook_size(cfg)
    if total > budget:
        raise BudgetExceededError(
            f"full codebook cardinality {total} exceeds enumeration budget {budget}"
        )
    hvec = _channel_vector(h)
    if hvec.size != cfg.n_elements:
        raise ValueError(f"channel has {hvec.size} entries, config expects {cfg.n_elements}")
    tre, tim = kernels.antenna_tables(hvec, cfg)

    threads = max(1, int(threads))
    if threads == 1 or total <= threads:
        best_mag2, best_flat = kernels.scan_range(tre, tim, 0, total)
    else:
        chunk = -(-total // threads)
        spans = [(s, min(s + chunk, total)) for s in range(0, total, chunk)]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(
                pool.map(lambda ab: kernels.scan_range(tre, tim, ab[0], ab[1]), spans)
            )
        best_mag2, best_flat = -1.0, -1
        for mag2, flat in parts:  # span order, so ties keep the lowest index
            if flat >= 0 and mag2 > best_mag2:
                best_mag2, best_flat = mag2, flat
    sv = steering_from_flat(best_flat, cfg)
    return sv, received_power(hvec, sv, cfg)
