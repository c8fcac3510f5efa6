# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled row reduction over a prime field (int64 entries in [0, p)).

Mirror of conetower._modp_py: same pivot rule, bit-identical output.
Input must be C-contiguous int64; modified in place.
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


cdef long long inv_mod(long long a, long long p):
    # extended Euclid; a nonzero mod p
    cdef long long g = a % p, x = 1, x1 = 0, g1 = p, q, t
    while g1 != 0:
        q = g // g1
        t = g - q * g1; g = g1; g1 = t
        t = x - q * x1; x = x1; x1 = t
    x %= p
    if x < 0:
        x += p
    return x


def rref_inplace(cnp.int64_t[:, ::1] A, long long p):
    """Reduce A to reduced row echelon form in place; return pivot columns."""
    cdef Py_ssize_t rows = A.shape[0], cols = A.shape[1]
    cdef Py_ssize_t r = 0, c, i, j, pr
    cdef long long piv, inv, f, tmp
    pivots = []
    for c in range(cols):
        if r == rows:
            break
        pr = -1
        for i in range(r, rows):
            if A[i, c] != 0:
                pr = i
                break
        if pr < 0:
            continue
        if pr != r:
            for j in range(cols):
                tmp = A[r, j]; A[r, j] = A[pr, j]; A[pr, j] = tmp
        piv = A[r, c]
        if piv != 1:
            inv = inv_mod(piv, p)
            for j in range(cols):
                A[r, j] = (A[r, j] * inv) % p
        for i in range(rows):
            if i == r:
                continue
            f = A[i, c]
            if f != 0:
                for j in range(cols):
                    A[i, j] = (A[i, j] - f * A[r, j]) % p
                    if A[i, j] < 0:
                        A[i, j] += p
        pivots.append(c)
        r += 1
    return pivots
