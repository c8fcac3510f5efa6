"""Coefficient localization at a prime and the local-global comparison.

The p-local category keeps the same Z-complexes; only morphism groups
change, by tensoring with Z_(p).  A chain map vanishes p-locally exactly
when its hom class is torsion of order coprime to p, so the local tower is
the global tower with a different death test.  Local Member certificates
carry a multiplier s coprime to p with proj o lift = s * id_Y.
"""

from __future__ import annotations

from dataclasses import dataclass
from .complexes import ChainMap, Complex, map_scal
from .envelope import GeneratorSet, TowerReport, check_membership
from .exactlin import FgAbelianGroup, is_prime, snf
from .homspace import HomSpace, hom_space, null_homotopy


def p_part(n: int, p: int) -> int:
    """Largest power of p dividing n (n > 0)."""
    out = 1
    while n % p == 0:
        n //= p
        out *= p
    return out


def factorize(n: int) -> dict[int, int]:
    """Prime factorization by trial division; fine at invariant-factor scale."""
    n = abs(int(n))
    out: dict[int, int] = {}
    if n < 2:
        return out
    f = 2
    while f * f <= n:
        while n % f == 0:
            out[f] = out.get(f, 0) + 1
            n //= f
        f += 1 if f == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def localize_group(G: FgAbelianGroup, p: int) -> FgAbelianGroup:
    """Tensor with Z_(p): free rank kept, invariant factors cut to p-parts."""
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    factors = tuple(q for q in (p_part(d, p) for d in G.invariant_factors) if q >= 2)
    return FgAbelianGroup(G.free_rank, factors)


@dataclass(frozen=True)
class LocalizedHomGroup:
    """A hom group together with its image under Hom (x) Z_(p)."""

    prime: int
    global_group: FgAbelianGroup
    local_group: FgAbelianGroup
    generator_orders: tuple[int, ...]  # local order per global generator; 0 = infinite


def localize_hom(H: HomSpace, p: int) -> LocalizedHomGroup:
    if H.mode != "integer":
        raise ValueError("localization needs integer mode")
    orders = tuple(p_part(d, p) for d in H.group.invariant_factors) + (0,) * H.group.free_rank
    return LocalizedHomGroup(p, H.group, localize_group(H.group, p), orders)


def is_zero_local(f: ChainMap, p: int, hom: HomSpace | None = None) -> bool:
    """Does f vanish in the p-local category?

    Exact test: the class of f is torsion of order coprime to p.
    """
    if f.source.ctx.mode != "integer":
        raise ValueError("localization needs integer mode")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    H = hom if hom is not None else hom_space(f.source, f.target)
    order = H.class_order(f)
    return order is not None and order % p != 0


def local_death_test(p: int):
    """Death test for the p-local tower: returns (s, h) with dh + hd = s*f
    and gcd(s, p) = 1, or None."""

    def test(f: ChainMap, hom: HomSpace):
        order = hom.class_order(f)
        if order is None or order % p == 0:
            return None
        h = null_homotopy(map_scal(order, f))
        if h is None:
            raise AssertionError("class order lied about a null-homotopic multiple")
        return order, h

    return test


def check_membership_local(
    D: GeneratorSet, Y: Complex, p: int, max_stages: int
) -> TowerReport:
    """The envelope tower in C_p: same objects and generators, with
    is_zero_local as the death test."""
    if Y.ctx.mode != "integer":
        raise ValueError("localization needs integer mode")
    if not is_prime(p):
        raise ValueError(f"{p} is not prime")
    return check_membership(D, Y, max_stages, death_test=local_death_test(p), prime=p)


def relevant_primes(D: GeneratorSet, Y: Complex) -> tuple[int, ...]:
    """Primes visible in the instance: divisors of any invariant factor of
    any Hom group among D u {Y}, and of any elementary divisor of their
    differentials.  A finite surrogate for 'all maximal ideals'."""
    if Y.ctx.mode != "integer":
        raise ValueError("localization needs integer mode")
    objs = list(D.elements) + [Y]
    primes: set[int] = set()
    for X in objs:
        for i in range(len(X.ranks) - 1):
            M = [list(row) for row in X.diffs[i]]
            if M and M[0]:
                for d in snf(M).diag:
                    primes.update(factorize(d))
    for A in objs:
        for B in objs:
            H = hom_space(A, B)
            for d in H.group.invariant_factors:
                primes.update(factorize(d))
    return tuple(sorted(primes))


@dataclass(frozen=True)
class LocalGlobalReport:
    """Verdict matrix of the global tower against the p-local towers."""

    global_report: TowerReport
    local_reports: tuple[tuple[int, TowerReport], ...]
    fault_primes: tuple[int, ...]  # local misses membership the global run proved
    locals_suggest_membership: bool  # all locals Member while global Undetermined
    primes_were_auto: bool

    @property
    def consistent(self) -> bool:
        return not self.fault_primes


def local_global_report(
    D: GeneratorSet,
    Y: Complex,
    primes: tuple[int, ...] | None = None,
    max_stages: int = 6,
) -> LocalGlobalReport:
    """Run the global tower and one tower per prime; flag inconsistencies.

    The prime list is a heuristic surrogate for all maximal ideals: exact on
    instances whose torsion is visible in D u {Y}, never a proof.
    """
    auto = primes is None
    plist = relevant_primes(D, Y) if auto else tuple(sorted(set(primes)))
    glob = check_membership(D, Y, max_stages)
    locs = []
    faults = []
    all_member = bool(plist)
    for p in plist:
        rep = check_membership_local(D, Y, p, max_stages)
        locs.append((p, rep))
        if not rep.is_member:
            all_member = False
        if glob.is_member:
            if not rep.is_member or rep.stage > glob.stage:
                faults.append(p)
    return LocalGlobalReport(
        glob,
        tuple(locs),
        tuple(faults),
        (not glob.is_member) and all_member,
        auto,
    )
