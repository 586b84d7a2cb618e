"""Times the compiled and pure-Python order-p kernel scans on the same inputs.

    python3 bench/bench_scan.py [--repeat N]
"""
from __future__ import annotations

import argparse
import time

from sextics import _scan_py

try:
    from sextics import _scan
except ImportError:
    _scan = None

# (torsion weights, p): the scans behind the torus, Z/5, Z/7 and (Z/3)^k searches
CASES = [
    ([3] * 9, 3),
    ([6, 6, 3, 3, 3, 3, 3], 3),
    ([5, 5, 5, 5], 5),
    ([10, 5, 5], 5),
    ([7, 7, 7], 7),
    ([18, 3], 3),
]


def timed(fn, weights, p, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn(list(weights), p)
        best = min(best, time.perf_counter() - t0)
    return best, sorted(out)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    if _scan is None:
        print("compiled extension not built; only the Python timings are shown")
    print(f"{'weights':<28}{'p':>3}{'python ms':>12}{'cython ms':>12}{'speedup':>9}")
    for weights, p in CASES:
        tp, rp = timed(_scan_py.scan_cyclic, weights, p, args.repeat)
        if _scan is None:
            print(f"{str(weights):<28}{p:>3}{tp * 1e3:>12.3f}")
            continue
        tc, rc = timed(_scan.scan_cyclic, weights, p, args.repeat)
        assert rp == rc, f"backends disagree on {weights}, p={p}"
        print(f"{str(weights):<28}{p:>3}{tp * 1e3:>12.3f}{tc * 1e3:>12.3f}{tp / tc:>8.1f}x")


if __name__ == "__main__":
    main()
