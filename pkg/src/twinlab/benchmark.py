"""Benchmark the compiled scanning kernels against the numpy fallback.

Run as ``python -m twinlab.benchmark``.  Both implementations are checked
against each other before timing.
"""
from __future__ import annotations

import sys
import time

import numpy as np

from twinlab import scan, words


def _time(fn, repeats: int) -> float:
    t0 = time.perf_counter()
    for _ in range(repeats):
        fn()
    return (time.perf_counter() - t0) / repeats


def run(n: int = 100_000, k: int = 2, r: int = 2, trials: int = 20, seed: int = 7):
    impls = scan.backends()
    ws = [np.ascontiguousarray(words.random_word(n, k, seed, stream_id=i).symbols)
          for i in range(trials)]
    for w in ws[:3]:
        results = {name: impl.max_rpower_scan(w, r) for name, impl in impls.items()}
        if len(set(results.values())) != 1:
            raise AssertionError(f"backend disagreement: {results}")
    print(f"max_rpower_scan  n={n} k={k} r={r}  ({trials} words)")
    rows = []
    for name, impl in impls.items():
        dt = _time(lambda: [impl.max_rpower_scan(w, r) for w in ws], 1) / trials
        rows.append((name, dt))
        print(f"  {name:>9}: {dt * 1e3:8.2f} ms/word")
    if len(rows) == 2:
        slow = max(rows, key=lambda x: x[1])[1]
        fast = min(rows, key=lambda x: x[1])[1]
        print(f"  speedup: {slow / fast:.1f}x")
    print(f"longest_match_run  n={n} m=3")
    for name, impl in impls.items():
        dt = _time(lambda: [impl.longest_match_run(w, 3) for w in ws], 1) / trials
        print(f"  {name:>9}: {dt * 1e3:8.2f} ms/word")
    print(f"active backend: {scan.BACKEND}")


if __name__ == "__main__":
    run(*(int(a) for a in sys.argv[1:]))
