"""Vectorised numpy fallback for the scanning kernels.

Same contracts as ``twinlab._scan_c``.  The repetition scan batches the
probe positions of every candidate block length into one gather and runs
the left/right run expansion as vector steps over a shrinking set of
surviving probes; the probe layout depends only on (n, r) and is cached.
"""
from __future__ import annotations

import numpy as np

_probe_cache: dict = {}


def longest_match_run(w: np.ndarray, m: int) -> int:
    n = len(w)
    if m < 1 or m > n:
        raise ValueError("shift out of range")
    bits = w[: n - m] == w[m:]
    if not bits.any():
        return 0
    edges = np.flatnonzero(np.diff(np.concatenate(([False], bits, [False]))))
    return int((edges[1::2] - edges[::2]).max())


def _probes(n: int, r: int):
    key = (n, r)
    got = _probe_cache.get(key)
    if got is not None:
        return got
    ms, js = [], []
    for m in range(1, n // r + 1):
        L = (r - 1) * m
        pos = np.arange(L - 1, n - m, L, dtype=np.int64)
        ms.append(np.full(len(pos), m, dtype=np.int64))
        js.append(pos)
    if ms:
        out = (np.concatenate(ms), np.concatenate(js))
    else:
        out = (np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64))
    if len(_probe_cache) > 8:
        _probe_cache.clear()
    _probe_cache[key] = out
    return out


def max_rpower_scan(w: np.ndarray, r: int) -> tuple[int, int]:
    if r < 2:
        raise ValueError("multiplicity must be >= 2")
    n = len(w)
    M, J = _probes(n, r)
    if len(M) == 0:
        return 0, -1
    hit = w[J] == w[J + M]
    M, J = M[hit], J[hit]
    if len(M) == 0:
        return 0, -1
    lo = J.copy()
    hi = J.copy()

    # full leftward expansion: the reported start is the run's left edge
    act = np.arange(len(M))
    while len(act):
        can = lo[act] > 0
        act = act[can]
        if len(act) == 0:
            break
        step = w[lo[act] - 1] == w[lo[act] - 1 + M[act]]
        act = act[step]
        lo[act] -= 1

    # rightward expansion, stopping each probe once its run is long enough
    need = (r - 1) * M
    nb = n - M
    act = np.flatnonzero(hi - lo + 1 < need)
    while len(act):
        can = hi[act] + 1 < nb[act]
        act = act[can]
        if len(act) == 0:
            break
        step = w[hi[act] + 1] == w[hi[act] + 1 + M[act]]
        act = act[step]
        hi[act] += 1
        act = act[hi[act] - lo[act] + 1 < need[act]]

    ok = hi - lo + 1 >= need
    if not ok.any():
        return 0, -1
    best_m = int(M[ok].max())
    starts = lo[ok & (M == best_m)]
    return best_m, int(starts.min())
