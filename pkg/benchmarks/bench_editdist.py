#!/usr/bin/env python3
"""Compare the numba kernel against the pure-numpy fallback.

The workload mirrors post-processing: every generated entity is scored
against every enumerated text sub-span, so throughput is pairs/second of
the edit-distance DP on short-to-medium strings.

    python benchmarks/bench_editdist.py [--pairs 20000] [--max-len 40]

The numba path is also selectable at runtime with KGREX_NO_NUMBA=1; this
script calls both implementations directly so one process covers both.
"""

from __future__ import annotations

import argparse
import random
import string
import time

from kgrex import editdist


def make_pairs(n: int, max_len: int, seed: int) -> list[tuple]:
    rng = random.Random(seed)
    glyphs = string.ascii_letters + "  ,.'-"

    def s():
        return "".join(rng.choice(glyphs) for _ in range(rng.randint(0, max_len)))

    return [(editdist._encode(s()), editdist._encode(s())) for _ in range(n)]


def bench(fn, pairs, repeats: int = 3) -> tuple[float, int]:
    best = float("inf")
    checksum = 0
    for _ in range(repeats):
        start = time.perf_counter()
        checksum = 0
        for a, b in pairs:
            checksum += fn(a, b)
        best = min(best, time.perf_counter() - start)
    return best, checksum


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--pairs", type=int, default=20_000)
    parser.add_argument("--max-len", type=int, default=40)
    parser.add_argument("--seed", type=int, default=0)
    args = parser.parse_args()

    pairs = make_pairs(args.pairs, args.max_len, args.seed)
    candidates = [("numpy", editdist._distance_numpy)]
    if editdist.active_backend() == "numba":
        editdist.warmup()
        candidates.insert(0, ("numba", editdist._distance_jit))
    else:
        print("numba unavailable or disabled (KGREX_NO_NUMBA); "
              "benchmarking the numpy path only")

    results = {}
    for name, fn in candidates:
        elapsed, checksum = bench(fn, pairs)
        results[name] = (elapsed, checksum)
        print(f"{name:>6}: {elapsed:8.3f}s  "
              f"{args.pairs / elapsed:12,.0f} pairs/s  (checksum {checksum})")

    if len(results) == 2:
        checksums = {c for _, c in results.values()}
        assert len(checksums) == 1, "backends disagree!"
        speedup = results["numpy"][0] / results["numba"][0]
        print(f"numba speedup over numpy: {speedup:.1f}x")


if __name__ == "__main__":
    main()
