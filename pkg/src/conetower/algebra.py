"""Coefficient contexts: a finite-dimensional algebra over F_p, or Z itself.

Module maps between free modules are matrices of algebra elements acting by
right multiplication, so composing two maps multiplies matrices with the
entry products order-reversed.  Entries are coordinate tuples over the
algebra basis in field mode and plain Python ints in integer mode.
"""

from __future__ import annotations

from dataclasses import dataclass

from .exactlin import FieldSpec
from .kernels import rref


class AssociativityViolation(ValueError):
    def __init__(self, triple):
        self.triple = triple
        super().__init__(f"associativity fails on basis triple {triple}")


class UnitViolation(ValueError):
    def __init__(self, index, side):
        self.index = index
        self.side = side
        super().__init__(f"unit law fails on basis element {index} ({side})")


class NotFiniteDimensional(ValueError):
    pass


@dataclass(frozen=True)
class AlgebraPresentation:
    """Associative unital F_p-algebra by structure constants.

    mult[i][j] holds the coordinates of (basis_i * basis_j).
    """

    p: int
    dim: int
    unit: tuple[int, ...]
    mult: tuple[tuple[tuple[int, ...], ...], ...]


def _mul_coords(alg: AlgebraPresentation, a, b):
    p = alg.p
    out = [0] * alg.dim
    for i, ai in enumerate(a):
        if not ai:
            continue
        for j, bj in enumerate(b):
            if not bj:
                continue
            c = ai * bj
            for k, cijk in enumerate(alg.mult[i][j]):
                if cijk:
                    out[k] = (out[k] + c * cijk) % p
    return tuple(out)


def make_algebra(p: int, dim: int, unit, mult) -> AlgebraPresentation:
    """Validate and freeze a structure-constant presentation.

    Raises AssociativityViolation / UnitViolation with the failing indices.
    """
    FieldSpec(p)
    if dim < 1:
        raise ValueError("algebra dimension must be positive")
    unit = tuple(int(u) % p for u in unit)
    if len(unit) != dim:
        raise ValueError("unit vector has wrong length")
    tensor = []
    for i in range(dim):
        row = []
        for j in range(dim):
            entry = tuple(int(c) % p for c in mult[i][j])
            if len(entry) != dim:
                raise ValueError(f"mult[{i}][{j}] has wrong length")
            row.append(entry)
        tensor.append(tuple(row))
    alg = AlgebraPresentation(p, dim, unit, tuple(tensor))

    basis = [tuple(1 if k == i else 0 for k in range(dim)) for i in range(dim)]
    for i in range(dim):
        if _mul_coords(alg, alg.unit, basis[i]) != basis[i]:
            raise UnitViolation(i, "left")
        if _mul_coords(alg, basis[i], alg.unit) != basis[i]:
            raise UnitViolation(i, "right")
    for i in range(dim):
        for j in range(dim):
            ij = alg.mult[i][j]
            for k in range(dim):
                left = _mul_coords(alg, ij, basis[k])
                right = _mul_coords(alg, basis[i], alg.mult[j][k])
                if left != right:
                    raise AssociativityViolation((i, j, k))
    return alg


def base_field_algebra(p: int) -> AlgebraPresentation:
    """F_p itself as a 1-dimensional algebra."""
    return make_algebra(p, 1, (1,), (((1,),),))


# ---------------------------------------------------------------------------
# quivers


@dataclass(frozen=True)
class QuiverPresentation:
    """Quiver with relations; relations are F_p-combinations of parallel paths.

    arrows: (name, source, target) triples; a relation is a tuple of
    (coefficient, path) terms where a path is a tuple of arrow indices in
    diagram order (first arrow applied first).
    """

    p: int
    vertices: int
    arrows: tuple[tuple[str, int, int], ...]
    relations: tuple[tuple[tuple[int, tuple[int, ...]], ...], ...]
    maxlen: int


def _path_ends(q: QuiverPresentation, path):
    if not path:
        raise ValueError("empty path needs a vertex")
    src = q.arrows[path[0]][1]
    tgt = q.arrows[path[-1]][2]
    for a, b in zip(path, path[1:]):
        if q.arrows[a][2] != q.arrows[b][1]:
            raise ValueError(f"non-composable path {path}")
    return src, tgt


def path_algebra(q: QuiverPresentation, path_cap: int = 50000) -> AlgebraPresentation:
    """Quotient of the path algebra, validated as an AlgebraPresentation.

    Basis = path classes of length <= maxlen surviving the relations; raises
    NotFiniteDimensional when a longer path survives.  The relation ideal is
    spanned inside the window of paths of length <= 2*maxlen, which is exact
    for length-homogeneous and monomial relations.
    """
    if q.maxlen < 1:
        raise ValueError("truncation bound must be >= 1")
    if q.vertices < 1:
        raise ValueError("quiver needs at least one vertex")
    for rel in q.relations:
        if not rel:
            raise ValueError("empty relation")
        ends = {_path_ends(q, path) for _, path in rel}
        if len(ends) != 1:
            raise ValueError(f"relation mixes non-parallel paths: {rel}")
        if any(not path for _, path in rel):
            raise ValueError("relations must not involve trivial paths")

    window = 2 * q.maxlen
    # paths[l] = list of (src, tgt, arrows); trivial paths carry src == tgt
    paths = [[(v, v, ()) for v in range(q.vertices)]]
    total = q.vertices
    for l in range(1, window + 1):
        layer = []
        for src, tgt, arrs in paths[l - 1]:
            for idx, (_, a_src, a_tgt) in enumerate(q.arrows):
                if a_src == tgt:
                    layer.append((src, a_tgt, arrs + (idx,)))
        total += len(layer)
        if total > path_cap:
            raise NotFiniteDimensional(
                f"more than {path_cap} paths within the truncation window"
            )
        paths.append(layer)

    # column order: longest first, so surviving (non-pivot) classes are short
    all_paths = [p_ for layer in paths for p_ in layer]
    all_paths.sort(key=lambda t: (-len(t[2]), t))
    col_of = {t: i for i, t in enumerate(all_paths)}
    ncols = len(all_paths)

    rows = []
    for rel in q.relations:
        rel_len = max(len(path) for _, path in rel)
        src, tgt = _path_ends(q, rel[0][1])
        for lu in range(0, window - rel_len + 1):
            for u in paths[lu]:
                if u[1] != src:
                    continue
                for lv in range(0, window - rel_len - lu + 1):
                    for v in paths[lv]:
                        if v[0] != tgt:
                            continue
                        vec = [0] * ncols
                        for coef, path in rel:
                            full = (u[0], v[1], u[2] + path + v[2])
                            vec[col_of[full]] = (vec[col_of[full]] + coef) % q.p
                        if any(vec):
                            rows.append(vec)
    if rows:
        R, pivots = rref(rows, q.p)
    else:
        R, pivots = None, []
    pivot_set = set(pivots)

    survivors = [t for i, t in enumerate(all_paths) if i not in pivot_set]
    for t in survivors:
        if len(t[2]) > q.maxlen:
            raise NotFiniteDimensional(
                f"path of length {len(t[2])} survives the relations: {t}"
            )
    basis = sorted(survivors, key=lambda t: (len(t[2]), t))
    index = {t: i for i, t in enumerate(basis)}
    dim = len(basis)

    def reduce_path(t):
        """Coordinates of a path's class in the surviving basis."""
        vec = [0] * ncols
        vec[col_of[t]] = 1
        if R is not None:
            for i, c in enumerate(pivots):
                f = vec[c]
                if f:
                    for j in range(ncols):
                        if R[i, j]:
                            vec[j] = (vec[j] - f * int(R[i, j])) % q.p
        out = [0] * dim
        for i, t2 in enumerate(all_paths):
            if vec[i]:
                out[index[t2]] = vec[i]
        return out

    mult = []
    for u in basis:
        row = []
        for v in basis:
            if u[1] != v[0]:
                row.append(tuple([0] * dim))
            else:
                row.append(tuple(reduce_path((u[0], v[1], u[2] + v[2]))))
        mult.append(tuple(row))
    unit = [0] * dim
    for v in range(q.vertices):
        t = (v, v, ())
        if t not in index:
            raise UnitViolation(v, "idempotent killed by relations")
        unit[index[t]] = 1
    return make_algebra(q.p, dim, tuple(unit), tuple(mult))


# ---------------------------------------------------------------------------
# coefficient contexts


@dataclass(frozen=True)
class IntegerContext:
    """Complexes of free Z-modules; entries are Python ints."""

    @property
    def mode(self):
        return "integer"

    @property
    def dim(self):
        return 1

    zero = 0
    one = 1

    def add(self, a, b):
        return a + b

    def neg(self, a):
        return -a

    def mul(self, a, b):
        return a * b

    def scal(self, c, a):
        return c * a

    def is_zero(self, a):
        return a == 0

    def coords(self, a):
        return (a,)

    def from_coords(self, t):
        return t[0]

    def left_matrix(self, a):
        return [[a]]

    def right_matrix(self, a):
        return [[a]]

    def describe(self):
        return "Z"


@dataclass(frozen=True)
class FieldContext:
    """Free modules over a finite-dimensional F_p-algebra; entries are
    coordinate tuples over the algebra basis."""

    algebra: AlgebraPresentation

    @property
    def mode(self):
        return "field"

    @property
    def p(self):
        return self.algebra.p

    @property
    def dim(self):
        return self.algebra.dim

    @property
    def zero(self):
        return tuple([0] * self.algebra.dim)

    @property
    def one(self):
        return self.algebra.unit

    def add(self, a, b):
        p = self.algebra.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def neg(self, a):
        p = self.algebra.p
        return tuple((-x) % p for x in a)

    def mul(self, a, b):
        return _mul_coords(self.algebra, a, b)

    def scal(self, c, a):
        p = self.algebra.p
        return tuple((c * x) % p for x in a)

    def is_zero(self, a):
        return not any(a)

    def coords(self, a):
        return tuple(a)

    def from_coords(self, t):
        return tuple(t)

    def left_matrix(self, a):
        """Base matrix of x -> a*x on coordinates."""
        alg = self.algebra
        M = [[0] * alg.dim for _ in range(alg.dim)]
        for j in range(alg.dim):
            col = _mul_coords(alg, a, tuple(1 if i == j else 0 for i in range(alg.dim)))
            for k in range(alg.dim):
                M[k][j] = col[k]
        return M

    def right_matrix(self, a):
        """Base matrix of x -> x*a on coordinates."""
        alg = self.algebra
        M = [[0] * alg.dim for _ in range(alg.dim)]
        for i in range(alg.dim):
            col = _mul_coords(alg, tuple(1 if k == i else 0 for k in range(alg.dim)), a)
            for k in range(alg.dim):
                M[k][i] = col[k]
        return M

    def invert(self, a):
        """Two-sided inverse of a, or None."""
        import numpy as np

        from .exactlin import solve_field

        L = np.array(self.left_matrix(a), dtype=np.int64)
        x = solve_field(L, list(self.one), FieldSpec(self.p))
        if x is None:
            return None
        inv = tuple(int(v) % self.p for v in x)
        if self.mul(inv, a) != self.one:
            return None
        return inv

    def describe(self):
        return f"F_{self.p} algebra of dimension {self.dim}"


def unit_entry_inverse(ctx, a):
    """Inverse of a matrix entry when it is a unit, else None."""
    if ctx.mode == "integer":
        return a if a in (1, -1) else None
    return ctx.invert(a)


# ---------------------------------------------------------------------------
# matrices of context entries (module maps, stored as tuples of row tuples;
# an r x 0 matrix is r empty rows, a 0 x c matrix is ())


def mat_zero(ctx, rows: int, cols: int):
    z = ctx.zero
    return tuple(tuple(z for _ in range(cols)) for _ in range(rows))


def mat_identity(ctx, n: int):
    z, o = ctx.zero, ctx.one
    return tuple(tuple(o if i == j else z for j in range(n)) for i in range(n))


def mat_add(ctx, A, B):
    return tuple(tuple(ctx.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def mat_sub(ctx, A, B):
    return tuple(
        tuple(ctx.add(a, ctx.neg(b)) for a, b in zip(ra, rb)) for ra, rb in zip(A, B)
    )


def mat_neg(ctx, A):
    return tuple(tuple(ctx.neg(a) for a in row) for row in A)


def mat_scal(ctx, c: int, A):
    return tuple(tuple(ctx.scal(c, a) for a in row) for row in A)


def mat_is_zero(ctx, A):
    return all(ctx.is_zero(a) for row in A for a in row)


def mat_compose(ctx, B, A, cols: int | None = None):
    """Matrix of the composite map (B after A).

    A: n x m (a map with m source columns), B: k x n; entry products are
    taken in source-first order, as right multiplication requires.  cols
    fixes m when A has no rows (composition through a rank-0 module).
    """
    k = len(B)
    n = len(A)
    m = len(A[0]) if n else (cols or 0)
    out = []
    for l in range(k):
        Bl = B[l]
        row = []
        for j in range(m):
            acc = ctx.zero
            for i in range(n):
                a = A[i][j]
                if ctx.is_zero(a):
                    continue
                b = Bl[i]
                if ctx.is_zero(b):
                    continue
                acc = ctx.add(acc, ctx.mul(a, b))
            row.append(acc)
        out.append(tuple(row))
    return tuple(out)


def mat_hstack(parts, rows: int):
    """Concatenate matrices with equal row count side by side."""
    if not parts:
        return tuple(() for _ in range(rows))
    out = []
    for i in range(rows):
        row = ()
        for Pt in parts:
            row = row + tuple(Pt[i])
        out.append(row)
    return tuple(out)


def mat_vstack(parts, cols: int):
    """Stack matrices with equal column count on top of each other."""
    out = []
    for Pt in parts:
        for row in Pt:
            out.append(tuple(row))
    return tuple(out)
