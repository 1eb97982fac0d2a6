#!/usr/bin/env python3
"""Compare the compiled and pure-Python kernel backends.

Times the two hot kernels (Gold sequence generation, CRC long division)
and the end-to-end blind-decode path that spends most of its cycles in
them. Run from the repo root after installing the package:

    python3 benchmarks/bench_backends.py [--repeats 200]
"""

import argparse
import time

import numpy as np

from nrpdcch import kernels
from nrpdcch.dci_codec import DciMessage, blind_decode, encode_candidate


def timeit(fn, repeats):
    best = float("inf")
    for _ in range(3):
        t0 = time.perf_counter()
        for _ in range(repeats):
            fn()
        best = min(best, (time.perf_counter() - t0) / repeats)
    return best


def bench_backend(name, repeats):
    kernels.use(name)
    rng = np.random.default_rng(99)
    crc_bits = rng.integers(0, 2, 164).astype(np.uint8)
    payload = tuple(int(b) for b in rng.integers(0, 2, 39))
    coded = encode_candidate(DciMessage("1_0", payload, 0x4601), 8, None, 12345)

    results = {
        "gold_2k_bits": timeit(lambda: kernels.gold_sequence(0x12345, 1728), repeats),
        "crc24_164_bits": timeit(lambda: kernels.crc_remainder(crc_bits, 0x1B2B117), repeats),
        "blind_decode_al8": timeit(
            lambda: blind_decode(coded.symbols, [("1_0", 39)], 0x4601, None, 12345), repeats),
    }
    return results


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--repeats", type=int, default=200)
    args = parser.parse_args()

    names = kernels.available()
    print(f"backends: {', '.join(names)} (active before run: {kernels.current()})")
    all_results = {}
    for name in names:
        all_results[name] = bench_backend(name, args.repeats)

    rows = sorted(next(iter(all_results.values())))
    print(f"\n{'kernel':<20}" + "".join(f"{n:>14}" for n in names) + f"{'speedup':>10}")
    for row in rows:
        line = f"{row:<20}"
        for n in names:
            line += f"{all_results[n][row] * 1e6:>12.1f}us"
        if len(names) == 2:
            slow = max(all_results[n][row] for n in names)
            fast = min(all_results[n][row] for n in names)
            line += f"{slow / fast:>9.1f}x"
        print(line)

    if "c" in names:
        kernels.use("c")


if __name__ == "__main__":
    main()
