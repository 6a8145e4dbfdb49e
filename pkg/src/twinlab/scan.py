"""Backend selection for the scanning kernels.

Imports the compiled extension when it was built, otherwise the numpy
fallback.  ``BACKEND`` names the active implementation; both are importable
directly for cross-checking and benchmarks.
"""
from __future__ import annotations

import numpy as np

from twinlab import _scan_py

try:
    from twinlab import _scan_c
    _impl = _scan_c
    BACKEND = "compiled"
except ImportError:
    _scan_c = None
    _impl = _scan_py
    BACKEND = "numpy"

__all__ = ["BACKEND", "longest_match_run", "max_rpower_scan", "backends"]


def _as_i64(w) -> np.ndarray:
    return np.ascontiguousarray(w, dtype=np.int64)


def longest_match_run(w, m: int) -> int:
    return int(_impl.longest_match_run(_as_i64(w), int(m)))


def max_rpower_scan(w, r: int) -> tuple[int, int]:
    m, start = _impl.max_rpower_scan(_as_i64(w), int(r))
    return int(m), int(start)


def backends() -> dict:
    """Importable implementations keyed by name (for tests and benchmarks)."""
    out = {"numpy": _scan_py}
    if _scan_c is not None:
        out["compiled"] = _scan_c
    return out
