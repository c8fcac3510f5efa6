"""Pure-Python (numpy) row reduction over a prime field.

Reference implementation of the elimination kernel; conetower.kernels picks
the compiled Cython version when available.  Both must produce identical
output: pivot = first row with a nonzero entry in the current column.
"""

from __future__ import annotations

import numpy as np


def rref_inplace(M: np.ndarray, p: int) -> list[int]:
    """Reduce M (int64, entries in [0, p)) to reduced row echelon form.

    Returns the list of pivot column indices.  M is modified in place.
    """
    rows, cols = M.shape
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(M[r:, c])[0]
        if nz.size == 0:
            continue
        pr = r + int(nz[0])
        if pr != r:
            M[[r, pr]] = M[[pr, r]]
        piv = int(M[r, c])
        if piv != 1:
            inv = pow(piv, p - 2, p)
            M[r] = (M[r] * inv) % p
        col = M[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            M[nzr] = (M[nzr] - np.outer(col[nzr], M[r])) % p
        pivots.append(c)
        r += 1
    return pivots
