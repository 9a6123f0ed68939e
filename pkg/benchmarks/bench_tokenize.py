"""Compare the compiled token scanner against the pure-Python one.

Run:  python3 benchmarks/bench_tokenize.py [--n 400] [--repeats 5]
"""

from __future__ import annotations

import argparse
import time

from tokrepair._scan_py import MODE_FIX, MODE_LOC, scan as scan_py
from tokrepair.synthetic import generate_corpus, preset

try:
    from tokrepair._scan_c import scan as scan_c
except ImportError:
    scan_c = None


def bench(scan, sources, repeats: int) -> float:
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        for src in sources:
            scan(src, MODE_LOC)
            scan(src, MODE_FIX)
        best = min(best, time.perf_counter() - t0)
    return best


def main() -> None:
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=400)
    ap.add_argument("--repeats", type=int, default=5)
    args = ap.parse_args()

    samples, _ = generate_corpus(preset("standard", seed=7, n_functions=args.n))
    sources = [s.buggy for s in samples] + [s.fixed for s in samples]
    chars = sum(len(s) for s in sources)
    print(f"{len(sources)} sources, {chars} chars, best of {args.repeats}")

    t_py = bench(scan_py, sources, args.repeats)
    print(f"pure python : {t_py * 1e3:8.2f} ms  ({chars / t_py / 1e6:6.1f} MB/s)")
    if scan_c is None:
        print("compiled    : not built (TOKREPAIR_NO_EXT or build skipped)")
        return
    for src in sources[:50]:
        assert scan_c(src, MODE_LOC) == scan_py(src, MODE_LOC)
        assert scan_c(src, MODE_FIX) == scan_py(src, MODE_FIX)
    t_c = bench(scan_c, sources, args.repeats)
    print(f"compiled    : {t_c * 1e3:8.2f} ms  ({chars / t_c / 1e6:6.1f} MB/s)")
    print(f"speedup     : {t_py / t_c:8.2f}x")


if __name__ == "__main__":
    main()
