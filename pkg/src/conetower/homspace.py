"""Hom groups in the homotopy category: chain maps modulo null-homotopy.

The commutation and homotopy conditions are assembled as one exact linear
system over the base (F_p or Z) in the coordinates of the unknown graded
map; quotients are taken by row reduction in field mode and by Smith normal
form of the cycle-lattice / boundary-lattice presentation in integer mode.
"""

from __future__ import annotations

import itertools

import numpy as np

from .complexes import ChainMap, Complex, Homotopy, compose, homotopy_realizes, identity_map, map_sub
from .exactlin import (
    AbelianNF,
    FieldSpec,
    IntSolver,
    abelian_group,
    mat_vec_int,
    rref_field,
    solve_field,
)


class GradedLayout:
    """Coordinate layout for degree-k graded maps X -> Y.

    The component at degree d maps X^d -> Y^{d+k}; blocks are ordered by
    ascending degree, row-major within a block, entry coordinates innermost.
    """

    def __init__(self, X: Complex, Y: Complex, k: int):
        self.X, self.Y, self.k = X, Y, k
        self.edim = X.ctx.dim
        self.degrees = [
            d
            for d in range(min(X.start, Y.start - k), max(X.end, Y.end - k))
            if X.rank(d) and Y.rank(d + k)
        ]
        self.offsets = {}
        n = 0
        for d in self.degrees:
            self.offsets[d] = n
            n += Y.rank(d + k) * X.rank(d) * self.edim
        self.size = n

    def index(self, d: int, l: int, j: int, c: int) -> int:
        return self.offsets[d] + (l * self.X.rank(d) + j) * self.edim + c

    def vec_of(self, comps) -> list[int]:
        """Flatten degree-indexed component matrices into coordinates."""
        ctx = self.X.ctx
        v = [0] * self.size
        for d in self.degrees:
            M = comps(d)
            for l, row in enumerate(M):
                for j, e in enumerate(row):
                    for c, val in enumerate(ctx.coords(e)):
                        v[self.index(d, l, j, c)] = val
        return v

    def comps_of(self, vec) -> list[tuple[int, tuple]]:
        """Rebuild component matrices from a coordinate vector."""
        ctx = self.X.ctx
        out = []
        for d in self.degrees:
            rt, rs = self.Y.rank(d + self.k), self.X.rank(d)
            M = []
            for l in range(rt):
                row = []
                for j in range(rs):
                    base = self.offsets[d] + (l * rs + j) * self.edim
                    row.append(ctx.from_coords(tuple(int(vec[base + c]) for c in range(self.edim))))
                M.append(tuple(row))
            out.append((d, tuple(M)))
        return out


def graded_operator(X: Complex, Y: Complex, k: int, sign_post: int, sign_pre: int):
    """Base matrix of f |-> sign_post*(d_Y o f) + sign_pre*(f o d_X)
    from degree-k graded maps to degree-(k+1) graded maps.

    Returns (rows_layout, cols_layout, matrix as list of int lists).
    """
    ctx = X.ctx
    src = GradedLayout(X, Y, k)
    dst = GradedLayout(X, Y, k + 1)
    M = [[0] * src.size for _ in range(dst.size)]
    for d in dst.degrees:
        rt = Y.rank(d + k + 1)
        rs = X.rank(d)
        if d in src.offsets:
            dY = Y.diff(d + k)  # Y^{d+k} -> Y^{d+k+1}
            for l in range(rt):
                for i in range(Y.rank(d + k)):
                    e = dY[l][i]
                    if ctx.is_zero(e):
                        continue
                    R = ctx.right_matrix(e)
                    for j in range(rs):
                        for c in range(src.edim):
                            ri = dst.index(d, l, j, c)
                            for c2 in range(src.edim):
                                if R[c][c2]:
                                    M[ri][src.index(d, i, j, c2)] += sign_post * R[c][c2]
        if (d + 1) in src.offsets:
            dX = X.diff(d)  # X^d -> X^{d+1}
            for i in range(X.rank(d + 1)):
                for j in range(rs):
                    e = dX[i][j]
                    if ctx.is_zero(e):
                        continue
                    L = ctx.left_matrix(e)
                    for l in range(rt):
                        for c in range(src.edim):
                            ri = dst.index(d, l, j, c)
                            for c2 in range(src.edim):
                                if L[c][c2]:
                                    M[ri][src.index(d + 1, l, i, c2)] += sign_pre * L[c][c2]
    return src, dst, M


class HomSpace:
    """Hom_K(X, Y): an F_p basis in field mode, a finitely generated abelian
    group with generator representatives in integer mode.

    Coordinates of a class are with respect to the basis (field) or the
    normal form torsion-then-free generators (integer).
    """

    def __init__(self, X: Complex, Y: Complex):
        if X.ctx != Y.ctx:
            raise ValueError("complexes live over different contexts")
        self.X, self.Y = X, Y
        self.ctx = X.ctx
        self.mode = self.ctx.mode
        self.layout, _, delta = graded_operator(X, Y, 0, 1, -1)
        hlayout, _, sigma = graded_operator(X, Y, -1, 1, 1)
        # sigma maps degree -1 maps into degree 0 maps
        self._hlayout = hlayout
        n0 = self.layout.size
        if self.mode == "field":
            spec = FieldSpec(self.ctx.p)
            self._spec = spec
            _, _, K = rref_field(np.array(delta, dtype=np.int64).reshape(len(delta), n0) if delta else np.zeros((0, n0), dtype=np.int64), spec)
            B = np.array(sigma, dtype=np.int64).reshape(len(sigma), hlayout.size) if sigma else np.zeros((0, hlayout.size), dtype=np.int64)
            B = B % spec.p
            nb = B.shape[1]
            stacked = np.hstack([B, K]) if n0 else np.zeros((0, nb + K.shape[1]), dtype=np.int64)
            _, pivots, _ = rref_field(stacked, spec)
            rep_cols = [c - nb for c in pivots if c >= nb]
            self._B = B
            self._reps = K[:, rep_cols] if n0 else np.zeros((0, 0), dtype=np.int64)
            self.dim = len(rep_cols)
            self.basis = tuple(
                ChainMap(X, Y, tuple(self.layout.comps_of(self._reps[:, i])))
                for i in range(self.dim)
            )
        else:
            delta_rows = len(delta)
            ker_solver = IntSolver(delta, cols=n0) if delta_rows else None
            if ker_solver is not None:
                K = ker_solver.kernel_basis()
            else:
                K = [[1 if i == j else 0 for j in range(n0)] for i in range(n0)]
            z = len(K[0]) if K else 0
            self._K = K
            self._ksolver = IntSolver(K, cols=z)
            rels = []
            for col in range(hlayout.size):
                b = [sigma[r][col] for r in range(n0)]
                x = self._ksolver.solve(b)
                if x is None:
                    raise AssertionError("boundary outside the cycle lattice")
                rels.append(x)
            self.nf: AbelianNF = abelian_group(rels, generators=z)
            self.group = self.nf.group
            gens = []
            width = len(self.group.invariant_factors) + self.group.free_rank
            for t in range(width):
                e = [1 if i == t else 0 for i in range(width)]
                y = self.nf.lift(e)
                vec = mat_vec_int(K, y) if z else [0] * n0
                gens.append(ChainMap(X, Y, tuple(self.layout.comps_of(vec))))
            self.generators = tuple(gens)

    # -- shared surface ----------------------------------------------------

    @property
    def rank_summary(self) -> str:
        if self.mode == "field":
            return f"dim {self.dim}"
        return str(self.group)

    def generating_maps(self) -> tuple[ChainMap, ...]:
        return self.basis if self.mode == "field" else self.generators

    def coords(self, f: ChainMap) -> tuple[int, ...]:
        """Coordinates of the class of f (basis / normal-form generators)."""
        if f.source != self.X or f.target != self.Y:
            raise ValueError("map does not belong to this hom space")
        vec = self.layout.vec_of(f.component)
        if self.mode == "field":
            if self.dim == 0:
                return ()
            # columns: boundary generators, then quotient representatives
            A = np.hstack([self._B, self._reps])
            sol = solve_field(A, vec, self._spec)
            if sol is None:
                raise AssertionError("chain map outside the cycle space")
            return tuple(int(v) % self._spec.p for v in sol[-self.dim :])
        x = self._ksolver.solve(vec)
        if x is None:
            raise AssertionError("chain map outside the cycle lattice")
        return self.nf.coords(x)

    def zero_class(self, f: ChainMap) -> bool:
        return all(v == 0 for v in self.coords(f))

    def class_order(self, f: ChainMap) -> int | None:
        """Additive order of the class; None when infinite (integer mode)."""
        if self.mode == "field":
            return 1 if self.zero_class(f) else self.ctx.p
        vec = self.layout.vec_of(f.component)
        x = self._ksolver.solve(vec)
        if x is None:
            raise AssertionError("chain map outside the cycle lattice")
        return self.nf.class_order(x)

    def from_coords(self, c) -> ChainMap:
        """A representative chain map with the given class coordinates."""
        if self.mode == "field":
            if len(c) != self.dim:
                raise ValueError(f"expected {self.dim} coordinates")
            vec = (self._reps @ np.array(c, dtype=np.int64)) % self._spec.p if self.dim else np.zeros(self.layout.size, dtype=np.int64)
            return ChainMap(self.X, self.Y, tuple(self.layout.comps_of(vec)))
        y = self.nf.lift(list(c))
        vec = mat_vec_int(self._K, y) if self._K and self._K[0] else [0] * self.layout.size
        return ChainMap(self.X, self.Y, tuple(self.layout.comps_of(vec)))

    def enumerate_classes(self, free_bound: int = 2, cap: int = 4096):
        """All classes (field) or the torsion x bounded-free grid (integer).

        Yields representative chain maps; raises EnumerationCap when the
        class count would exceed cap.
        """
        if self.mode == "field":
            total = self.ctx.p ** self.dim
            if total > cap:
                raise EnumerationCap(f"{total} classes exceed cap {cap}")
            for c in itertools.product(range(self.ctx.p), repeat=self.dim):
                yield self.from_coords(c)
        else:
            ranges = [range(d) for d in self.group.invariant_factors]
            ranges += [range(-free_bound, free_bound + 1)] * self.group.free_rank
            total = 1
            for r in ranges:
                total *= len(r)
            if total > cap:
                raise EnumerationCap(f"{total} classes exceed cap {cap}")
            for c in itertools.product(*ranges):
                yield self.from_coords(c)


class EnumerationCap(RuntimeError):
    pass


def hom_space(X: Complex, Y: Complex) -> HomSpace:
    return HomSpace(X, Y)


def null_homotopy(f: ChainMap) -> Homotopy | None:
    """A homotopy h with f = d h + h d, or None; the witness re-validates."""
    X, Y = f.source, f.target
    hlayout, l0, sigma = graded_operator(X, Y, -1, 1, 1)
    b = l0.vec_of(f.component)
    if X.ctx.mode == "field":
        spec = FieldSpec(X.ctx.p)
        A = np.array(sigma, dtype=np.int64).reshape(len(sigma), hlayout.size) if sigma else np.zeros((l0.size, hlayout.size), dtype=np.int64)
        sol = solve_field(A, b, spec)
        if sol is None:
            return None
    else:
        sol = IntSolver(sigma, cols=hlayout.size).solve(b)
        if sol is None:
            return None
    h = Homotopy(X, Y, tuple(hlayout.comps_of(sol)))
    if not homotopy_realizes(h, f):
        raise AssertionError("solver returned an invalid homotopy")
    return h


def is_contractible(X: Complex) -> Homotopy | None:
    """A null-homotopy of id_X when X is contractible."""
    return null_homotopy(identity_map(X))


def verify_retract(s: ChainMap, r: ChainMap) -> Homotopy | None:
    """Witness that r o s ~ id on the source of s, or None."""
    if s.source != r.target or s.target != r.source:
        raise ValueError("retract pair must be X -> Y and Y -> X")
    return null_homotopy(map_sub(compose(r, s), identity_map(s.source)))


def induced_matrix(src: HomSpace, g: ChainMap, dst: HomSpace):
    """Matrix of postcomposition with g on hom classes.

    src = Hom(T, A), dst = Hom(T, B), g: A -> B; columns are dst-coordinates
    of g o (src generator).
    """
    cols = []
    for b in src.generating_maps():
        cols.append(dst.coords(compose(g, b)))
    width = len(dst.generating_maps())
    return [[col[i] for col in cols] for i in range(width)]
