"""Shared generators for the randomized suites (seeded, deterministic)."""

from __future__ import annotations

import random

from conetower.algebra import FieldContext, IntegerContext, base_field_algebra
from conetower.complexes import (
    ChainMap,
    Complex,
    cone,
    direct_sum_many,
    identity_map,
    map_scal,
    stalk,
    two_term,
    zero_map,
)
from conetower.homspace import hom_space

F2 = FieldContext(base_field_algebra(2))
F3 = FieldContext(base_field_algebra(3))
ZCTX = IntegerContext()


def cyclic_complex(m: int) -> Complex:
    """C(m) = cone(m: Z[0] -> Z[0]), supported in degrees -1, 0."""
    Z0 = stalk(ZCTX, 0)
    return cone(map_scal(m, identity_map(Z0)))[0]


def random_entry(ctx, rng: random.Random):
    if ctx.mode == "integer":
        return rng.randint(-3, 3)
    return tuple(rng.randrange(ctx.p) for _ in range(ctx.dim))


def random_complex(ctx, rng: random.Random, max_total_rank: int = 5) -> Complex:
    """Sums of stalks and two-term pieces, optionally glued by one cone.

    Cones of maps between such sums give differentials with off-diagonal
    blocks while keeping d o d = 0 by construction.
    """
    def piece() -> Complex:
        d = rng.randint(-1, 1)
        if rng.random() < 0.5:
            return stalk(ctx, d, rng.randint(1, 2))
        return two_term(ctx, random_entry(ctx, rng), d)

    parts = [piece()]
    while sum(p.total_rank for p in parts) < max_total_rank and rng.random() < 0.5:
        parts.append(piece())
    X = direct_sum_many(parts)[0] if len(parts) > 1 else parts[0]
    if rng.random() < 0.4:
        other = piece()
        if X.total_rank + other.total_rank <= max_total_rank:
            f = random_map(rng, other, X)
            X = cone(f)[0]
    if X.total_rank > max_total_rank or X.is_zero:
        return stalk(ctx, 0)
    return X


def random_map(rng: random.Random, X: Complex, Y: Complex) -> ChainMap:
    """A random homotopy class, via coordinates in Hom_K(X, Y)."""
    H = hom_space(X, Y)
    if H.mode == "field":
        if H.dim == 0:
            return zero_map(X, Y)
        return H.from_coords(tuple(rng.randrange(H.ctx.p) for _ in range(H.dim)))
    coords = [rng.randrange(d) for d in H.group.invariant_factors]
    coords += [rng.randint(-2, 2) for _ in range(H.group.free_rank)]
    if not coords:
        return zero_map(X, Y)
    return H.from_coords(coords)


def random_int_matrix(rng: random.Random, rows: int, cols: int, lo=-9, hi=9):
    return [[rng.randint(lo, hi) for _ in range(cols)] for _ in range(rows)]


def shifted_stalk(ctx, j: int, rank: int = 1) -> Complex:
    """k concentrated in degree j (i.e. k[0] shifted by -j)."""
    return stalk(ctx, j, rank)


def f2_rank2_objects() -> list[Complex]:
    """The six nonzero homotopy types over F_2 with support in {0, 1} and
    total rank <= 2: stalk sums and the contractible two-term complex."""
    k0 = stalk(F2, 0)
    k1 = stalk(F2, 1)
    return [
        k0,
        k1,
        direct_sum_many([k0, k0])[0],
        direct_sum_many([k0, k1])[0],
        direct_sum_many([k1, k1])[0],
        two_term(F2, (1,), 0),
    ]
