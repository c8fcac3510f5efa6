"""Bounded complexes of free modules, chain maps, shifts, cones, sums.

Conventions (fixed once, exercised by the rotation tests):
  * cohomological grading, the differential raises degree;
  * shift X[m]^d = X^{d+m} with differential scaled by (-1)^m;
  * cone(f)^d = X^{d+1} (+) Y^d with differential [[-d_X, 0], [f, d_Y]].

Equality of complexes and maps is literal (same ranks, same matrices);
homotopy equivalence is witness-based and lives in conetower.homspace.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .algebra import (
    mat_compose,
    mat_hstack,
    mat_identity,
    mat_is_zero,
    mat_neg,
    mat_scal,
    mat_sub,
    mat_vstack,
    mat_zero,
    unit_entry_inverse,
)


class DSquaredNonzero(ValueError):
    def __init__(self, degree):
        self.degree = degree
        super().__init__(f"d o d != 0 at degree {degree}")


class NotAChainMap(ValueError):
    pass


class ShapeMismatch(ValueError):
    pass


@dataclass(frozen=True)
class Complex:
    """Bounded complex of free modules; ranks[i] is the rank in degree
    start + i, diffs[i] the matrix of d: X^{start+i} -> X^{start+i+1}."""

    ctx: object
    start: int
    ranks: tuple[int, ...]
    diffs: tuple[tuple, ...]

    def __post_init__(self):
        ranks = tuple(int(r) for r in self.ranks)
        diffs = tuple(tuple(tuple(row) for row in M) for M in self.diffs)
        if any(r < 0 for r in ranks):
            raise ValueError("negative rank")
        if len(diffs) != max(len(ranks) - 1, 0):
            raise ShapeMismatch("need one differential per adjacent degree pair")
        for i, M in enumerate(diffs):
            if len(M) != ranks[i + 1] or any(len(row) != ranks[i] for row in M):
                raise ShapeMismatch(f"differential {i} has wrong shape")
        # trim zero ranks at both ends
        lo = 0
        hi = len(ranks)
        while lo < hi and ranks[lo] == 0:
            lo += 1
        while hi > lo and ranks[hi - 1] == 0:
            hi -= 1
        start = self.start + lo
        ranks = ranks[lo:hi]
        diffs = diffs[lo : max(hi - 1, lo)]
        if not ranks:
            start = 0
        object.__setattr__(self, "start", start)
        object.__setattr__(self, "ranks", ranks)
        object.__setattr__(self, "diffs", diffs)
        for i in range(len(diffs) - 1):
            if ranks[i] and ranks[i + 1] and ranks[i + 2]:
                sq = mat_compose(self.ctx, diffs[i + 1], diffs[i], cols=ranks[i])
                if not mat_is_zero(self.ctx, sq):
                    raise DSquaredNonzero(start + i)

    @property
    def end(self) -> int:
        """One past the last degree with nonzero rank."""
        return self.start + len(self.ranks)

    def rank(self, d: int) -> int:
        if self.start <= d < self.end:
            return self.ranks[d - self.start]
        return 0

    def diff(self, d: int):
        i = d - self.start
        if 0 <= i < len(self.diffs):
            return self.diffs[i]
        return mat_zero(self.ctx, self.rank(d + 1), self.rank(d))

    @property
    def total_rank(self) -> int:
        return sum(self.ranks)

    @property
    def is_zero(self) -> bool:
        return not self.ranks

    def degrees(self):
        return range(self.start, self.end)

    def __str__(self):
        if self.is_zero:
            return "0"
        return " ".join(f"{d}:{self.rank(d)}" for d in self.degrees())


def zero_complex(ctx) -> Complex:
    return Complex(ctx, 0, (), ())


def stalk(ctx, degree: int = 0, rank: int = 1) -> Complex:
    """Free module of the given rank concentrated in one degree."""
    return Complex(ctx, degree, (rank,), ())


def two_term(ctx, entry, degree: int = -1) -> Complex:
    """Rank-one two-term complex (A -entry-> A) starting at `degree`."""
    return Complex(ctx, degree, (1, 1), (((entry,),),))


@dataclass(frozen=True)
class ChainMap:
    """Degreewise matrices commuting with the differentials.

    Components are stored exactly for the degrees where both source and
    target have nonzero rank, so equality of maps is literal.
    """

    source: Complex
    target: Complex
    comps: tuple[tuple[int, tuple], ...] = field(default=())

    def __post_init__(self):
        if self.source.ctx != self.target.ctx:
            raise ValueError("source and target live over different contexts")
        ctx = self.source.ctx
        given = dict(self.comps)
        comps = []
        for d in range(
            min(self.source.start, self.target.start),
            max(self.source.end, self.target.end),
        ):
            rs, rt = self.source.rank(d), self.target.rank(d)
            if rs == 0 or rt == 0:
                if d in given and not mat_is_zero(ctx, given[d]):
                    raise ShapeMismatch(f"component at degree {d} must be empty")
                continue
            M = given.get(d, mat_zero(ctx, rt, rs))
            M = tuple(tuple(row) for row in M)
            if len(M) != rt or any(len(row) != rs for row in M):
                raise ShapeMismatch(f"component at degree {d} has wrong shape")
            comps.append((d, M))
        object.__setattr__(self, "comps", tuple(comps))
        for d in range(
            min(self.source.start, self.target.start) - 1,
            max(self.source.end, self.target.end) + 1,
        ):
            if self.source.rank(d) == 0 or self.target.rank(d + 1) == 0:
                continue
            lhs = mat_compose(ctx, self.target.diff(d), self.component(d), cols=self.source.rank(d))
            rhs = mat_compose(ctx, self.component(d + 1), self.source.diff(d), cols=self.source.rank(d))
            if lhs != rhs:
                raise NotAChainMap(f"does not commute with differentials at degree {d}")

    def component(self, d: int):
        for dd, M in self.comps:
            if dd == d:
                return M
        return mat_zero(self.source.ctx, self.target.rank(d), self.source.rank(d))

    @property
    def is_zero(self) -> bool:
        return all(mat_is_zero(self.source.ctx, M) for _, M in self.comps)


@dataclass(frozen=True)
class Homotopy:
    """Degree-lowering maps h^d: X^d -> Y^{d-1} witnessing null-homotopy."""

    source: Complex
    target: Complex
    comps: tuple[tuple[int, tuple], ...] = field(default=())

    def __post_init__(self):
        ctx = self.source.ctx
        given = dict(self.comps)
        comps = []
        for d in range(self.source.start, self.source.end):
            rs, rt = self.source.rank(d), self.target.rank(d - 1)
            if rs == 0 or rt == 0:
                continue
            M = given.get(d, mat_zero(ctx, rt, rs))
            M = tuple(tuple(row) for row in M)
            if len(M) != rt or any(len(row) != rs for row in M):
                raise ShapeMismatch(f"homotopy component at degree {d} has wrong shape")
            comps.append((d, M))
        object.__setattr__(self, "comps", tuple(comps))

    def component(self, d: int):
        for dd, M in self.comps:
            if dd == d:
                return M
        return mat_zero(self.source.ctx, self.target.rank(d - 1), self.source.rank(d))

    def boundary(self) -> "ChainMap":
        """The chain map d_Y h + h d_X that this homotopy bounds."""
        ctx = self.source.ctx
        comps = []
        for d in range(self.source.start, self.source.end):
            rs = self.source.rank(d)
            if rs == 0 or self.target.rank(d) == 0:
                continue
            M = _madd(
                ctx,
                mat_compose(ctx, self.target.diff(d - 1), self.component(d), cols=rs),
                mat_compose(ctx, self.component(d + 1), self.source.diff(d), cols=rs),
            )
            comps.append((d, M))
        return ChainMap(self.source, self.target, tuple(comps))


def _madd(ctx, A, B):
    return tuple(tuple(ctx.add(a, b) for a, b in zip(ra, rb)) for ra, rb in zip(A, B))


def homotopy_realizes(h: Homotopy, f: ChainMap) -> bool:
    """True when f = d_Y h + h d_X degreewise."""
    if h.source != f.source or h.target != f.target:
        return False
    return map_equal(h.boundary(), f)


def identity_map(X: Complex) -> ChainMap:
    return ChainMap(X, X, tuple((d, mat_identity(X.ctx, X.rank(d))) for d in X.degrees() if X.rank(d)))


def zero_map(X: Complex, Y: Complex) -> ChainMap:
    return ChainMap(X, Y, ())


def map_equal(f: ChainMap, g: ChainMap) -> bool:
    return f.source == g.source and f.target == g.target and f.comps == g.comps


def map_add(f: ChainMap, g: ChainMap) -> ChainMap:
    ctx = f.source.ctx
    comps = tuple(
        (d, _madd(ctx, M, g.component(d))) for d, M in f.comps
    )
    return ChainMap(f.source, f.target, comps)


def map_sub(f: ChainMap, g: ChainMap) -> ChainMap:
    ctx = f.source.ctx
    comps = tuple((d, mat_sub(ctx, M, g.component(d))) for d, M in f.comps)
    return ChainMap(f.source, f.target, comps)


def map_scal(c: int, f: ChainMap) -> ChainMap:
    ctx = f.source.ctx
    return ChainMap(f.source, f.target, tuple((d, mat_scal(ctx, c, M)) for d, M in f.comps))


def compose(g: ChainMap, f: ChainMap) -> ChainMap:
    """The composite g o f."""
    if f.target != g.source:
        raise ShapeMismatch("compose: target of f != source of g")
    ctx = f.source.ctx
    comps = []
    for d in f.source.degrees():
        if f.source.rank(d) and g.target.rank(d):
            M = mat_compose(ctx, g.component(d), f.component(d), cols=f.source.rank(d))
            comps.append((d, M))
    return ChainMap(f.source, g.target, tuple(comps))


def shift(X: Complex, m: int) -> Complex:
    """X[m]^d = X^{d+m}, differential scaled by (-1)^m."""
    if X.is_zero or m == 0:
        return X if m == 0 else Complex(X.ctx, X.start - m, X.ranks, X.diffs)
    diffs = X.diffs if m % 2 == 0 else tuple(mat_neg(X.ctx, M) for M in X.diffs)
    return Complex(X.ctx, X.start - m, X.ranks, diffs)


def shift_map(f: ChainMap, m: int) -> ChainMap:
    comps = tuple((d - m, M) for d, M in f.comps)
    return ChainMap(shift(f.source, m), shift(f.target, m), comps)


def direct_sum(X: Complex, Y: Complex):
    """X (+) Y with the four canonical injections/projections."""
    S, injs, projs = direct_sum_many([X, Y])
    return S, injs[0], injs[1], projs[0], projs[1]


def direct_sum_many(parts: list[Complex]):
    """Finite direct sum with all canonical injections and projections."""
    if not parts:
        raise ValueError("empty direct sum: use zero_complex")
    ctx = parts[0].ctx
    nonzero = [P for P in parts if not P.is_zero]
    if not nonzero:
        Z = zero_complex(ctx)
        return Z, [zero_map(P, Z) for P in parts], [zero_map(Z, P) for P in parts]
    start = min(P.start for P in nonzero)
    end = max(P.end for P in nonzero)
    ranks = tuple(sum(P.rank(d) for P in parts) for d in range(start, end))
    diffs = []
    for d in range(start, end - 1):
        blocks = []
        for i, P in enumerate(parts):
            row = [mat_zero(ctx, P.rank(d + 1), Q.rank(d)) for Q in parts]
            row[i] = P.diff(d)
            blocks.append(mat_hstack(row, P.rank(d + 1)))
        diffs.append(mat_vstack(blocks, ranks[d - start]))
    S = Complex(ctx, start, ranks, tuple(diffs))
    injs = []
    projs = []
    for i, P in enumerate(parts):
        icomp = []
        pcomp = []
        for d in range(start, end):
            if P.rank(d) == 0 or S.rank(d) == 0:
                continue
            col = [mat_zero(ctx, Q.rank(d), P.rank(d)) for Q in parts]
            col[i] = mat_identity(ctx, P.rank(d))
            icomp.append((d, mat_vstack(col, P.rank(d))))
            row = [mat_zero(ctx, P.rank(d), Q.rank(d)) for Q in parts]
            row[i] = mat_identity(ctx, P.rank(d))
            pcomp.append((d, mat_hstack(row, P.rank(d))))
        injs.append(ChainMap(P, S, tuple(icomp)))
        projs.append(ChainMap(S, P, tuple(pcomp)))
    return S, injs, projs


def cone(f: ChainMap):
    """Mapping cone with the canonical triangle maps.

    Returns (C, incl: Y -> C, proj: C -> X[1]); (f, incl, proj) is the
    standard distinguished triangle.
    """
    X, Y = f.source, f.target
    ctx = X.ctx
    lo = min(X.start - 1, Y.start)
    hi = max(X.end - 1, Y.end)
    if X.is_zero:
        lo, hi = (Y.start, Y.end) if not Y.is_zero else (0, 0)
    if Y.is_zero and not X.is_zero:
        lo, hi = X.start - 1, X.end - 1
    ranks = tuple(X.rank(d + 1) + Y.rank(d) for d in range(lo, hi))
    diffs = []
    for d in range(lo, hi - 1):
        top = mat_hstack(
            [mat_neg(ctx, X.diff(d + 1)), mat_zero(ctx, X.rank(d + 2), Y.rank(d))],
            X.rank(d + 2),
        )
        bot = mat_hstack([f.component(d + 1), Y.diff(d)], Y.rank(d + 1))
        diffs.append(mat_vstack([top, bot], X.rank(d + 1) + Y.rank(d)))
    C = Complex(ctx, lo, ranks, tuple(diffs))
    icomp = []
    pcomp = []
    for d in range(lo, hi):
        rx, ry = X.rank(d + 1), Y.rank(d)
        if ry and (rx + ry):
            icomp.append(
                (d, mat_vstack([mat_zero(ctx, rx, ry), mat_identity(ctx, ry)], ry))
            )
        if rx and (rx + ry):
            pcomp.append(
                (d, mat_hstack([mat_identity(ctx, rx), mat_zero(ctx, rx, ry)], rx))
            )
    incl = ChainMap(Y, C, tuple(icomp))
    proj = ChainMap(C, shift(X, 1), tuple(pcomp))
    return C, incl, proj


def rotation_comparison(f: ChainMap):
    """The comparison maps phi: Cone(incl_f) -> X[1] and its standard
    homotopy inverse psi; both validated as chain maps."""
    X, Y = f.source, f.target
    ctx = X.ctx
    C1, incl, _ = cone(f)
    C2, _, _ = cone(incl)
    # C2^d = Y^{d+1} (+) X^{d+1} (+) Y^d
    X1 = shift(X, 1)
    pcomp = []
    qcomp = []
    for d in range(C2.start, C2.end):
        ry1, rx1, ry0 = Y.rank(d + 1), X.rank(d + 1), Y.rank(d)
        if rx1 and C2.rank(d):
            pcomp.append(
                (
                    d,
                    mat_hstack(
                        [
                            mat_zero(ctx, rx1, ry1),
                            mat_identity(ctx, rx1),
                            mat_zero(ctx, rx1, ry0),
                        ],
                        rx1,
                    ),
                )
            )
            qcomp.append(
                (
                    d,
                    mat_vstack(
                        [
                            mat_neg(ctx, f.component(d + 1)),
                            mat_identity(ctx, rx1),
                            mat_zero(ctx, ry0, rx1),
                        ],
                        rx1,
                    ),
                )
            )
    phi = ChainMap(C2, X1, tuple(pcomp))
    psi = ChainMap(X1, C2, tuple(qcomp))
    return phi, psi


def _expose_integer_units(X: Complex) -> Complex:
    """Basis-change one differential into Smith form when that uncovers a
    unit invariant factor hidden by the current bases (integer mode)."""
    from .exactlin import mat_mul_int, snf

    ctx = X.ctx
    for d in range(X.start, X.end - 1):
        M = [list(row) for row in X.diff(d)]
        if not M or not M[0]:
            continue
        if any(a in (1, -1) for row in M for a in row):
            continue
        res = snf(M)
        if not any(v == 1 for v in res.diag):
            continue
        U = [list(r) for r in res.Uinv]  # target basis change
        V = [list(r) for r in res.Vinv]  # source basis change inverse
        diffs = []
        for dd in range(X.start, X.end - 1):
            N = [list(row) for row in X.diff(dd)]
            if dd == d:
                diffs.append(tuple(tuple(r) for r in res.D))
            elif dd == d - 1 and N:
                diffs.append(tuple(tuple(r) for r in mat_mul_int([list(r) for r in res.V], N)))
            elif dd == d + 1 and N and N[0]:
                diffs.append(tuple(tuple(r) for r in mat_mul_int(N, [list(r) for r in res.U])))
            else:
                diffs.append(tuple(tuple(r) for r in N))
        return Complex(ctx, X.start, X.ranks, tuple(diffs))
    return X


def reduce_complex(X: Complex) -> Complex:
    """Split off all two-term summands with a unit differential entry.

    The result is homotopy equivalent to X (and a literal retract of it);
    over Z it removes +-1 entries (exposing units hidden by the basis via
    Smith form first), over a field algebra any invertible entry.
    """
    ctx = X.ctx
    cur = X
    while True:
        hit = None
        for d in range(cur.start, cur.end - 1):
            M = cur.diff(d)
            for i, row in enumerate(M):
                for j, a in enumerate(row):
                    if ctx.is_zero(a):
                        continue
                    inv = unit_entry_inverse(ctx, a)
                    if inv is not None:
                        hit = (d, i, j, inv)
                        break
                if hit:
                    break
            if hit:
                break
        if hit is None:
            if ctx.mode == "integer":
                exposed = _expose_integer_units(cur)
                if exposed is not cur:
                    cur = exposed
                    continue
            return cur
        d, i, j, inv = hit
        M = cur.diff(d)
        new_ranks = list(cur.ranks)
        new_ranks[d - cur.start] -= 1
        new_ranks[d + 1 - cur.start] -= 1
        new_diffs = []
        for dd in range(cur.start, cur.end - 1):
            N = cur.diff(dd)
            if dd == d - 1:
                new_diffs.append(tuple(row for r, row in enumerate(N) if r != j))
            elif dd == d:
                block = []
                for l, row in enumerate(N):
                    if l == i:
                        continue
                    out = []
                    for s, a in enumerate(row):
                        if s == j:
                            continue
                        corr = ctx.mul(ctx.mul(N[i][s], inv), N[l][j])
                        out.append(ctx.add(a, ctx.neg(corr)))
                    block.append(tuple(out))
                new_diffs.append(tuple(block))
            elif dd == d + 1:
                new_diffs.append(
                    tuple(tuple(a for s, a in enumerate(row) if s != i) for row in N)
                )
            else:
                new_diffs.append(N)
        cur = Complex(ctx, cur.start, tuple(new_ranks), tuple(new_diffs))
