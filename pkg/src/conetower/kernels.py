"""Elimination kernel selection: compiled extension if present, numpy fallback.

Set CONETOWER_PURE=1 to force the pure-Python kernel (used by the benchmark
and the cross-implementation tests).
"""

from __future__ import annotations

import os

import numpy as np

from . import _modp_py

if os.environ.get("CONETOWER_PURE"):
    _impl = _modp_py
    IMPLEMENTATION = "python"
else:
    try:
        from . import _modp_c as _impl  # type: ignore[no-redef]

        IMPLEMENTATION = "cython"
    except ImportError:
        _impl = _modp_py
        IMPLEMENTATION = "python"


def rref(M: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form over F_p.  Returns (R, pivot columns)."""
    # % p always allocates, so R never aliases the caller's array
    R = np.ascontiguousarray(np.asarray(M, dtype=np.int64) % p)
    pivots = _impl.rref_inplace(R, p)
    return R, list(pivots)
