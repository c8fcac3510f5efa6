"""Exact linear algebra over prime fields and over the integers.

Field-mode matrices are numpy int64 arrays with entries in [0, p); the
elimination kernel is selected in conetower.kernels.  Integer-mode matrices
are nested lists/tuples of Python ints, so Smith normal form runs with
arbitrary precision and no overflow.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd, lcm

import numpy as np

from .kernels import rref


class DimensionMismatch(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    f = 3
    while f * f <= n:
        if n % f == 0:
            return False
        f += 2
    return True


@dataclass(frozen=True)
class FieldSpec:
    """A prime field F_p with 2 <= p < 2**16."""

    p: int

    def __post_init__(self):
        if not (2 <= self.p < 2**16) or not is_prime(self.p):
            raise ValueError(f"characteristic must be a prime in [2, 2^16): {self.p}")


# ---------------------------------------------------------------------------
# prime fields


def rref_field(M, spec: FieldSpec):
    """Row-reduce M over F_p.

    Returns (rank, pivot column indices, kernel_basis) where the kernel basis
    columns span the nullspace: shape (cols, cols - rank).
    """
    A = np.asarray(M, dtype=np.int64)
    if A.ndim != 2:
        raise DimensionMismatch("matrix must be 2-dimensional")
    R, pivots = rref(A, spec.p)
    cols = A.shape[1]
    pivot_set = set(pivots)
    free = [c for c in range(cols) if c not in pivot_set]
    K = np.zeros((cols, len(free)), dtype=np.int64)
    for k, fc in enumerate(free):
        K[fc, k] = 1
        for i, pc in enumerate(pivots):
            K[pc, k] = (-int(R[i, fc])) % spec.p
    return len(pivots), pivots, K


def solve_field(A, b, spec: FieldSpec):
    """Solve A x = b over F_p; None when b is outside the column span."""
    A = np.asarray(A, dtype=np.int64)
    b = np.asarray(b, dtype=np.int64).reshape(-1)
    if A.shape[0] != b.shape[0]:
        raise DimensionMismatch(f"A has {A.shape[0]} rows, b has {b.shape[0]}")
    X, ok = solve_field_many(A, b.reshape(-1, 1), spec)
    if not ok[0]:
        return None
    return X[:, 0]


def solve_field_many(A, B, spec: FieldSpec):
    """Solve A X = B columnwise over F_p.

    Returns (X, ok) with X of shape (A.cols, B.cols); column j of X is valid
    only where ok[j] is True (free variables are set to zero).
    """
    A = np.asarray(A, dtype=np.int64)
    B = np.asarray(B, dtype=np.int64)
    m, n = A.shape
    k = B.shape[1]
    if B.shape[0] != m:
        raise DimensionMismatch(f"A has {m} rows, B has {B.shape[0]}")
    R, pivots = rref(np.hstack([A, B]), spec.p)
    apivots = [c for c in pivots if c < n]
    rank = len(apivots)
    ok = np.ones(k, dtype=bool)
    # rows at index >= rank have zero A-part; nonzero B entries there are
    # inconsistencies
    if rank < R.shape[0]:
        bad = np.nonzero(R[rank:, n:])
        ok[np.unique(bad[1])] = False
    X = np.zeros((n, k), dtype=np.int64)
    for i, pc in enumerate(apivots):
        X[pc, :] = R[i, n:]
    X[:, ~ok] = 0
    return X, ok


# ---------------------------------------------------------------------------
# integers

IntMat = list  # nested lists of Python ints


def _eye(n: int) -> list[list[int]]:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_vec_int(M, v) -> list[int]:
    return [sum(a * b for a, b in zip(row, v)) for row in M]


def mat_mul_int(M, N) -> list[list[int]]:
    if not M or not N:
        return [[0] * (len(N[0]) if N else 0) for _ in M]
    cols = len(N[0])
    return [[sum(row[i] * N[i][j] for i in range(len(N))) for j in range(cols)] for row in M]


def det_int(A) -> int:
    """Exact determinant via fraction-free (Bareiss) elimination."""
    n = len(A)
    if n == 0:
        return 1
    M = [list(map(int, row)) for row in A]
    if any(len(row) != n for row in M):
        raise DimensionMismatch("determinant needs a square matrix")
    sign = 1
    prev = 1
    for k in range(n - 1):
        if M[k][k] == 0:
            for i in range(k + 1, n):
                if M[i][k]:
                    M[k], M[i] = M[i], M[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * M[k][k] - M[i][k] * M[k][j]) // prev
        prev = M[k][k]
    return sign * M[n - 1][n - 1]


@dataclass(frozen=True)
class SNFResult:
    """A = U * D * V with U, V unimodular and D diagonal (divisibility chain)."""

    U: tuple
    D: tuple
    V: tuple
    Uinv: tuple
    Vinv: tuple

    @property
    def diag(self) -> tuple[int, ...]:
        return tuple(self.D[i][i] for i in range(min(len(self.D), len(self.D[0]) if self.D else 0)))

    @property
    def rank(self) -> int:
        return sum(1 for d in self.diag if d != 0)


def snf(A, cols: int | None = None) -> SNFResult:
    """Smith normal form of an integer matrix (arbitrary precision).

    cols is only needed to fix the width of a zero-row matrix.
    """
    m = len(A)
    n = len(A[0]) if m else (cols or 0)
    if any(len(row) != n for row in A):
        raise DimensionMismatch("ragged matrix")
    D = [list(map(int, row)) for row in A]
    U = _eye(m)
    Uinv = _eye(m)
    V = _eye(n)
    Vinv = _eye(n)

    def row_swap(i, k):
        D[i], D[k] = D[k], D[i]
        for r in U:
            r[i], r[k] = r[k], r[i]
        Uinv[i], Uinv[k] = Uinv[k], Uinv[i]

    def row_add(src, dst, q):
        # row_dst += q * row_src
        Ds, Dd = D[src], D[dst]
        for j in range(n):
            Dd[j] += q * Ds[j]
        for r in U:
            r[src] -= q * r[dst]
        Us, Ud = Uinv[src], Uinv[dst]
        for j in range(m):
            Ud[j] += q * Us[j]

    def row_neg(i):
        D[i] = [-x for x in D[i]]
        for r in U:
            r[i] = -r[i]
        Uinv[i] = [-x for x in Uinv[i]]

    def col_swap(j, l):
        for row in D:
            row[j], row[l] = row[l], row[j]
        V[j], V[l] = V[l], V[j]
        for r in Vinv:
            r[j], r[l] = r[l], r[j]

    def col_add(src, dst, q):
        # col_dst += q * col_src
        for row in D:
            row[dst] += q * row[src]
        Vs, Vd = V[src], V[dst]
        for j in range(n):
            Vs[j] -= q * Vd[j]
        for r in Vinv:
            r[dst] += q * r[src]

    t = 0
    while t < min(m, n):
        best = None
        pos = None
        for i in range(t, m):
            for j in range(t, n):
                v = abs(D[i][j])
                if v and (best is None or v < best):
                    best = v
                    pos = (i, j)
        if pos is None:
            break
        if pos[0] != t:
            row_swap(t, pos[0])
        if pos[1] != t:
            col_swap(t, pos[1])
        if D[t][t] < 0:
            row_neg(t)
        while True:
            piv = D[t][t]
            for i in range(t + 1, m):
                if D[i][t]:
                    q = D[i][t] // piv
                    if q:
                        row_add(t, i, -q)
            moved = False
            for i in range(t + 1, m):
                if D[i][t]:
                    row_swap(t, i)  # remainder < piv, positive
                    moved = True
                    break
            if moved:
                continue
            for j in range(t + 1, n):
                if D[t][j]:
                    q = D[t][j] // piv
                    if q:
                        col_add(t, j, -q)
            moved = False
            for j in range(t + 1, n):
                if D[t][j]:
                    col_swap(t, j)
                    moved = True
                    break
            if moved:
                continue
            bad = None
            for i in range(t + 1, m):
                for j in range(t + 1, n):
                    if D[i][j] % piv:
                        bad = i
                        break
                if bad is not None:
                    break
            if bad is None:
                break
            row_add(bad, t, 1)  # pivot untouched: D[bad][t] == 0
        t += 1

    frz = lambda M_: tuple(tuple(r) for r in M_)
    return SNFResult(frz(U), frz(D), frz(V), frz(Uinv), frz(Vinv))


class IntSolver:
    """SNF-backed solver for repeated exact solves of A x = b over Z."""

    def __init__(self, A, cols: int | None = None):
        self.m = len(A)
        self.n = len(A[0]) if self.m else (cols or 0)
        self.res = snf(A, cols=self.n)
        self.rank = self.res.rank

    def solve(self, b) -> list[int] | None:
        if len(b) != self.m:
            raise DimensionMismatch(f"expected {self.m} entries, got {len(b)}")
        c = mat_vec_int(self.res.Uinv, list(b))
        diag = self.res.diag
        y = [0] * self.n
        for i in range(self.m):
            di = diag[i] if i < len(diag) else 0
            if di:
                if c[i] % di:
                    return None
                y[i] = c[i] // di
            elif c[i]:
                return None
        return mat_vec_int(self.res.Vinv, y)

    def kernel_basis(self) -> list[list[int]]:
        """Columns form a basis of the integer kernel lattice (saturated)."""
        return [[self.res.Vinv[i][j] for j in range(self.rank, self.n)] for i in range(self.n)]


def solve_int(A, b, cols: int | None = None) -> list[int] | None:
    return IntSolver(A, cols=cols).solve(b)


def kernel_int(A, cols: int | None = None) -> list[list[int]]:
    return IntSolver(A, cols=cols).kernel_basis()


# ---------------------------------------------------------------------------
# finitely generated abelian groups


@dataclass(frozen=True)
class FgAbelianGroup:
    """Z^free_rank + sum of Z/d_i with d_1 | d_2 | ... and every d_i >= 2."""

    free_rank: int
    invariant_factors: tuple[int, ...]

    def __post_init__(self):
        if self.free_rank < 0:
            raise ValueError("negative free rank")
        prev = None
        for d in self.invariant_factors:
            if d < 2:
                raise ValueError(f"invariant factor {d} < 2")
            if prev is not None and d % prev:
                raise ValueError("invariant factors must form a divisibility chain")
            prev = d

    @property
    def is_trivial(self) -> bool:
        return self.free_rank == 0 and not self.invariant_factors

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append(f"Z^{self.free_rank}" if self.free_rank > 1 else "Z")
        return " + ".join(parts) if parts else "0"


class AbelianNF:
    """Cokernel presentation in normal form, with coordinate maps both ways.

    Coordinates are ordered: torsion summands first (matching
    group.invariant_factors), then free summands.
    """

    def __init__(self, presentation, generators: int | None = None):
        rel = [list(map(int, row)) for row in presentation]
        if rel:
            g = len(rel[0])
        elif generators is None:
            raise ValueError("generator count needed for an empty presentation")
        else:
            g = generators
        if generators is not None and g != generators:
            raise DimensionMismatch("presentation width != generator count")
        P = [[rel[i][j] for i in range(len(rel))] for j in range(g)]  # transpose
        res = snf(P, cols=len(rel))
        diag = res.diag
        s = sum(1 for d in diag if d != 0)
        self.ngens = g
        self._U = res.U
        self._Uinv = res.Uinv
        self.torsion_idx = [i for i in range(s) if diag[i] >= 2]
        self.free_idx = list(range(s, g))
        self.torsion = [diag[i] for i in self.torsion_idx]
        self.group = FgAbelianGroup(len(self.free_idx), tuple(self.torsion))

    def coords(self, x) -> tuple[int, ...]:
        """Normal-form coordinates of the class of x (generator coordinates)."""
        if len(x) != self.ngens:
            raise DimensionMismatch(f"expected {self.ngens} coordinates")
        y = mat_vec_int(self._Uinv, list(x))
        tor = tuple(y[i] % d for i, d in zip(self.torsion_idx, self.torsion))
        return tor + tuple(y[i] for i in self.free_idx)

    def lift(self, c) -> list[int]:
        """A generator-coordinate representative of normal-form coordinates c."""
        k = len(self.torsion_idx) + len(self.free_idx)
        if len(c) != k:
            raise DimensionMismatch(f"expected {k} coordinates")
        y = [0] * self.ngens
        for pos, i in enumerate(self.torsion_idx):
            y[i] = c[pos]
        for pos, i in enumerate(self.free_idx):
            y[i] = c[len(self.torsion_idx) + pos]
        return mat_vec_int(self._U, y)

    def is_zero(self, x) -> bool:
        return all(v == 0 for v in self.coords(x))

    def class_order(self, x) -> int | None:
        """Order of the class of x; None when infinite."""
        c = self.coords(x)
        nt = len(self.torsion)
        if any(c[nt:]):
            return None
        o = 1
        for d, v in zip(self.torsion, c[:nt]):
            o = lcm(o, d // gcd(d, v))
        return o


def abelian_group(presentation, generators: int | None = None) -> AbelianNF:
    """Normal form of the abelian group presented by rows = relations."""
    return AbelianNF(presentation, generators=generators)
