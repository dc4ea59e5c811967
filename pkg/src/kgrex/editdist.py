"""Levenshtein edit-distance kernels.

Post-processing scores every generated entity against every gold surface or
text sub-span, so the edit-distance DP is the one hot numeric loop in the
pipeline.  Two interchangeable implementations are provided:

* a numba ``@njit`` kernel (default; compiled with ``cache=True`` so repeat
  runs skip compilation, and ``nogil=True`` so worker threads overlap);
* a pure-numpy row-vectorized fallback.

Set ``KGREX_NO_NUMBA=1`` to force the numpy path (same results, slower on
long strings).  ``benchmarks/bench_editdist.py`` compares the two.
"""

from __future__ import annotations

import os

import numpy as np


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


def _encode(s: str) -> np.ndarray:
    # fixed-width UTF-32 gives one array element per code point
    return np.frombuffer(s.encode("utf-32-le"), dtype=np.uint32)


def _distance_scalar(a: np.ndarray, b: np.ndarray) -> int:
    """Two-row DP over code-point arrays.  Also the numba kernel body."""
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0:
        return lb
    if lb == 0:
        return la
    prev = np.arange(lb + 1, dtype=np.int64)
    curr = np.zeros(lb + 1, dtype=np.int64)
    for i in range(1, la + 1):
        curr[0] = i
        ca = a[i - 1]
        for j in range(1, lb + 1):
            sub = prev[j - 1]
            if ca != b[j - 1]:
                sub += 1
            best = prev[j] + 1
            ins = curr[j - 1] + 1
            if ins < best:
                best = ins
            if sub < best:
                best = sub
            curr[j] = best
        prev, curr = curr, prev
    return int(prev[lb])


def _distance_numpy(a: np.ndarray, b: np.ndarray) -> int:
    """Row-vectorized DP; insertions folded in with a prefix-min scan."""
    la = a.shape[0]
    lb = b.shape[0]
    if la == 0:
        return int(lb)
    if lb == 0:
        return int(la)
    offsets = np.arange(lb + 1, dtype=np.int64)
    prev = offsets.copy()
    curr = np.empty(lb + 1, dtype=np.int64)
    for i in range(la):
        curr[0] = i + 1
        np.minimum(prev[:-1] + (b != a[i]), prev[1:] + 1, out=curr[1:])
        # curr[j] <- j + min_{k<=j}(curr[k] - k) propagates insertion chains
        curr -= offsets
        np.minimum.accumulate(curr, out=curr)
        curr += offsets
        prev, curr = curr, prev
    return int(prev[lb])


_use_numba = not _env_flag("KGREX_NO_NUMBA")
if _use_numba:
    try:
        from numba import njit
    except ImportError:  # pragma: no cover - numba is a declared dependency
        _use_numba = False

if _use_numba:
    _distance_jit = njit(cache=True, nogil=True)(_distance_scalar)
    _distance_arrays = _distance_jit
else:
    _distance_arrays = _distance_numpy


def active_backend() -> str:
    """Name of the selected kernel, for diagnostics and benchmarks."""
    return "numba" if _use_numba else "numpy"


def warmup() -> None:
    """Trigger JIT compilation so timed code paths never pay for it."""
    _distance_arrays(_encode("ab"), _encode("ba"))


def distance(a: str, b: str) -> int:
    """Levenshtein edit distance between two strings."""
    return int(_distance_arrays(_encode(a), _encode(b)))


def similarity(a: str, b: str) -> float:
    """Normalized similarity ``1 - distance / max(len)``; two empty strings
    are identical (1.0)."""
    longest = max(len(a), len(b))
    if longest == 0:
        return 1.0
    return 1.0 - distance(a, b) / longest
