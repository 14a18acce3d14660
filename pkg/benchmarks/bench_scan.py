"""Compare the compiled and numpy exhaustive-scan kernels.

Runs the same per-antenna product tables through both backends, checks the
results agree bit for bit, and reports throughput.

    python3 benchmarks/bench_scan.py --array 2x2 --bits 4 --channels 20
"""

import argparse
import time

import numpy as np

from beamrefine import _scan_py
from beamrefine.arraymodel import ArrayConfig, codebook_size
from beamrefine.kernels import antenna_tables

try:
    from beamrefine import _scan as _scan_c
except ImportError:
    _scan_c = None


def bench(backend, tables, total, repeats):
    start = time.perf_counter()
    results = []
    for tre, tim in tables:
        for _ in range(repeats):
            results.append(backend.scan_range(tre, tim, 0, total))
    elapsed = time.perf_counter() - start
    return results, elapsed


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--array", default="2x2")
    ap.add_argument("--bits", type=int, default=4)
    ap.add_argument("--amp-bits", type=int, default=0)
    ap.add_argument("--channels", type=int, default=20)
    ap.add_argument("--repeats", type=int, default=1)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    L = int(args.array.lower().split("x")[0])
    cfg = ArrayConfig(L=L, N=args.bits, K_amp=args.amp_bits)
    total = codebook_size(cfg)
    rng = np.random.default_rng(args.seed)
    tables = []
    for _ in range(args.channels):
        h = (rng.standard_normal(cfg.n_elements) + 1j * rng.standard_normal(cfg.n_elements))
        tables.append(antenna_tables(h, cfg))

    scans = args.channels * args.repeats
    codewords = scans * total
    print(f"array {L}x{L}, N={args.bits}, K_amp={args.amp_bits}: "
          f"{total} codewords x {scans} scans")

    res_py, t_py = bench(_scan_py, tables, total, args.repeats)
    print(f"numpy    : {t_py:8.3f} s  ({codewords / t_py / 1e6:8.2f} Mcodewords/s)")

    if _scan_c is None:
        print("compiled : not built")
        return
    res_c, t_c = bench(_scan_c, tables, total, args.repeats)
    print(f"compiled : {t_c:8.3f} s  ({codewords / t_c / 1e6:8.2f} Mcodewords/s)")
    print(f"speedup  : {t_py / t_c:8.2f}x")
    assert res_py == res_c, "backends disagree"
    print("results  : bit-identical across backends")


if __name__ == "__main__":
    main()
