"""Envelope membership by cone towers, with verifiable certificates.

The tower kills the whole Hom group of every generator at each stage: all
generating morphisms e -> Y_{n-1} are coned off at once through a universal
evaluation map, so the induced map Hom(e, Y_n) -> Hom(e, Y_{n+1}) is zero
(one-step death).  Membership is detected when the composite Y -> Y_N
becomes null-homotopic; a certificate exhibiting Y as a retract of
Cone(Y -> Y_N)[-1] is then extracted and re-verified.  Non-membership is
never claimed: the procedure is a semi-decision and reports Undetermined
with per-stage diagnostics.

oracle_member is the independent ground-truth oracle: a bounded
breadth-first closure of the generator pool under cones of all enumerated
morphism classes, with a linear factorization test for the retract step.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from math import gcd

import numpy as np

from .algebra import mat_hstack, mat_identity, mat_scal, mat_vstack, mat_zero
from .complexes import (
    ChainMap,
    Complex,
    Homotopy,
    compose,
    cone,
    direct_sum_many,
    homotopy_realizes,
    identity_map,
    map_equal,
    map_scal,
    map_sub,
    reduce_complex,
    shift,
    zero_complex,
    zero_map,
)
from .exactlin import FieldSpec, IntSolver, abelian_group, rref_field, solve_field
from .homspace import EnumerationCap, HomSpace, hom_space, induced_matrix, is_contractible, null_homotopy, verify_retract


class LiftFailure(AssertionError):
    """Internal consistency fault: a certificate could not be assembled from
    a valid death witness."""


class BoundsExceeded(RuntimeError):
    """The oracle's internal enumeration caps were hit before a witness was
    found; the verdict would not be exhaustive."""


@dataclass(frozen=True)
class GeneratorSet:
    elements: tuple[Complex, ...]

    def __post_init__(self):
        elements = tuple(self.elements)
        if elements:
            ctx = elements[0].ctx
            if any(e.ctx != ctx for e in elements):
                raise ValueError("generators live over different contexts")
        object.__setattr__(self, "elements", elements)

    @property
    def ctx(self):
        if not self.elements:
            raise ValueError("empty generator set has no context")
        return self.elements[0].ctx


@dataclass(frozen=True)
class TowerStage:
    top: Complex  # Y_n
    alpha: ChainMap  # Y_{n-1} -> Y_n
    alpha0: ChainMap  # Y -> Y_n
    components: tuple[tuple[ChainMap, ...], ...]  # coned maps, per generator
    stationary: bool

    @property
    def manifest(self) -> tuple[tuple[int, int], ...]:
        """(generator index, multiplicity) of the summands coned here."""
        return tuple((k, len(maps)) for k, maps in enumerate(self.components))


@dataclass(frozen=True)
class TowerState:
    D: GeneratorSet
    Y: Complex
    stages: tuple[TowerStage, ...] = ()

    @property
    def top(self) -> Complex:
        return self.stages[-1].top if self.stages else self.Y

    @property
    def alpha0(self) -> ChainMap:
        return self.stages[-1].alpha0 if self.stages else identity_map(self.Y)

    @property
    def stage_count(self) -> int:
        return len(self.stages)


def _evaluation_map(D: GeneratorSet, target: Complex):
    """The universal evaluation map: one summand per generating morphism."""
    ctx = target.ctx
    per_gen = []
    sources = []
    all_maps = []
    for e in D.elements:
        gens = hom_space(e, target).generating_maps()
        per_gen.append(tuple(gens))
        sources.extend([e] * len(gens))
        all_maps.extend(gens)
    if not all_maps:
        return zero_map(zero_complex(ctx), target), tuple(per_gen)
    S, _, _ = direct_sum_many(sources)
    comps = []
    for d in range(S.start, S.end):
        if S.rank(d) == 0 or target.rank(d) == 0:
            continue
        blocks = [g.component(d) for g in all_maps]
        comps.append((d, mat_hstack(blocks, target.rank(d))))
    return ChainMap(S, target, tuple(comps)), tuple(per_gen)


def tower_step(state: TowerState) -> TowerState:
    """One stage: cone off every generating morphism into the current top."""
    prev = state.top
    ev, per_gen = _evaluation_map(state.D, prev)
    stationary = all(not maps for maps in per_gen)
    top, alpha, _ = cone(ev)
    if stationary and top != prev:
        raise AssertionError("cone over the zero object must not change the top")
    alpha0 = compose(alpha, state.alpha0)
    stage = TowerStage(top, alpha, alpha0, per_gen, stationary)
    return TowerState(state.D, state.Y, state.stages + (stage,))


@dataclass(frozen=True)
class MembershipCertificate:
    """Y is a retract of X' = Cone(alpha_{0,N})[-1], an iterated extension of
    the generators (per the stage components).

    proj o lift = multiplier * id_Y holds on the nose; multiplier is 1 for
    global runs and a unit at p for p-local runs.
    """

    stage: int
    multiplier: int
    prime: int | None
    Xprime: Complex
    proj: ChainMap
    lift: ChainMap
    homotopy: Homotopy
    stage_components: tuple[tuple[tuple[ChainMap, ...], ...], ...]

    @property
    def manifest(self) -> tuple[tuple[tuple[int, int], ...], ...]:
        return tuple(
            tuple((k, len(maps)) for k, maps in enumerate(stage))
            for stage in self.stage_components
        )


def _certificate_complex(Y: Complex, YN: Complex, alpha0: ChainMap):
    """X' = Cone(alpha0)[-1] with the canonical projection X' -> Y."""
    ctx = Y.ctx
    Calpha, _, _ = cone(alpha0)
    Xp = shift(Calpha, -1)  # X'^d = Y^d (+) Y_N^{d-1}
    pcomp = []
    for d in range(Xp.start, Xp.end):
        ry, rn = Y.rank(d), YN.rank(d - 1)
        if ry == 0:
            continue
        pcomp.append((d, mat_hstack([mat_identity(ctx, ry), mat_zero(ctx, ry, rn)], ry)))
    proj = ChainMap(Xp, Y, tuple(pcomp))
    return Xp, proj


def _certificate_lift(Y: Complex, YN: Complex, Xp: Complex, s: int, h: Homotopy) -> ChainMap:
    """The lift (s*id, -h): Y -> X'; a chain map exactly when dh+hd = s*alpha0."""
    ctx = Y.ctx
    rcomp = []
    for d in range(Xp.start, Xp.end):
        ry, rn = Y.rank(d), YN.rank(d - 1)
        if ry == 0:
            continue
        top = mat_scal(ctx, s, mat_identity(ctx, ry)) if s != 1 else mat_identity(ctx, ry)
        bot = mat_scal(ctx, -1, h.component(d)) if rn else mat_zero(ctx, rn, ry)
        rcomp.append((d, mat_vstack([top, bot], ry)))
    return ChainMap(Y, Xp, tuple(rcomp))


def extract_certificate(
    state: TowerState, N: int, h: Homotopy, multiplier: int = 1, prime: int | None = None
) -> MembershipCertificate:
    """Assemble and check the retract certificate from a death witness h with
    d h + h d = multiplier * alpha_{0,N}."""
    if N != state.stage_count:
        raise ValueError(f"witness is for stage {N}, state has {state.stage_count}")
    Y = state.Y
    alpha0 = state.alpha0
    YN = state.top
    if not homotopy_realizes(h, map_scal(multiplier, alpha0)):
        raise LiftFailure("death witness does not bound multiplier * alpha_{0,N}")
    Xp, proj = _certificate_complex(Y, YN, alpha0)
    lift = _certificate_lift(Y, YN, Xp, multiplier, h)
    want = map_scal(multiplier, identity_map(Y))
    got = compose(proj, lift)
    if not map_equal(got, want):
        raise LiftFailure("projection o lift != multiplier * id")
    witness = Homotopy(Y, Y, ())  # the factorization holds exactly
    cert = MembershipCertificate(
        N,
        multiplier,
        prime,
        Xp,
        proj,
        lift,
        witness,
        tuple(stage.components for stage in state.stages),
    )
    ok, reason = verify_certificate(cert, state.D, Y)
    if not ok:
        raise LiftFailure(f"freshly extracted certificate failed verification: {reason}")
    return cert


@dataclass
class CertificateData:
    """Untyped certificate contents (plain matrices), the unit of
    verification; file parsing produces this without deep validation so that
    tampering is reported as a named verification failure."""

    stage: int
    multiplier: int
    prime: int | None
    stage_maps: tuple  # per stage, per generator: tuple of comp tuples ((deg, matrix), ...)
    xprime_start: int
    xprime_ranks: tuple[int, ...]
    xprime_diffs: tuple
    proj_comps: tuple
    lift_comps: tuple
    homotopy_comps: tuple


def certificate_data(cert: MembershipCertificate) -> CertificateData:
    return CertificateData(
        cert.stage,
        cert.multiplier,
        cert.prime,
        tuple(
            tuple(tuple(m.comps for m in maps) for maps in stage)
            for stage in cert.stage_components
        ),
        cert.Xprime.start,
        cert.Xprime.ranks,
        cert.Xprime.diffs,
        cert.proj.comps,
        cert.lift.comps,
        cert.homotopy.comps,
    )


def verify_certificate_data(data: CertificateData, D: GeneratorSet, Y: Complex):
    """Re-check certificate contents from scratch; returns (ok, reason).

    Rebuilds the tower from the recorded component maps (validating each as
    a chain map from the named generator), reconstructs X' bit-exactly, and
    re-validates the retract identity proj o lift ~ multiplier * id_Y.
    """
    if data.stage != len(data.stage_maps):
        return False, "stage count does not match recorded components"
    if data.multiplier < 1:
        return False, "multiplier must be positive"
    if data.prime is not None and gcd(data.multiplier, data.prime) != 1:
        return False, "multiplier is not a unit at the certificate's prime"
    if data.prime is None and data.multiplier != 1:
        return False, "global certificate must have multiplier 1"
    ctx = Y.ctx
    prev = Y
    alpha0 = identity_map(Y)
    for n, stage_comps in enumerate(data.stage_maps, start=1):
        if len(stage_comps) != len(D.elements):
            return False, f"stage {n} records {len(stage_comps)} generator slots"
        sources = []
        all_maps = []
        for k, maps in enumerate(stage_comps):
            e = D.elements[k]
            for m in maps:
                try:
                    validated = ChainMap(e, prev, tuple(m))
                except Exception as exc:
                    return False, f"stage {n} generator {k}: invalid map ({exc})"
                sources.append(e)
                all_maps.append(validated)
        if all_maps:
            S, _, _ = direct_sum_many(sources)
            comps = []
            for d in range(S.start, S.end):
                if S.rank(d) == 0 or prev.rank(d) == 0:
                    continue
                comps.append((d, mat_hstack([g.component(d) for g in all_maps], prev.rank(d))))
            ev = ChainMap(S, prev, tuple(comps))
        else:
            ev = zero_map(zero_complex(ctx), prev)
        top, alpha, _ = cone(ev)
        alpha0 = compose(alpha, alpha0)
        prev = top
    Xp, proj = _certificate_complex(Y, prev, alpha0)
    if (Xp.start, Xp.ranks, Xp.diffs) != (
        data.xprime_start,
        tuple(data.xprime_ranks),
        tuple(data.xprime_diffs),
    ):
        return False, "X' does not reconstruct bit-exactly from the tower data"
    if proj.comps != tuple(data.proj_comps):
        return False, "projection is not the canonical rotated-triangle map"
    try:
        lift = ChainMap(Y, Xp, tuple(data.lift_comps))
    except Exception as exc:
        return False, f"lift is not a chain map ({exc})"
    try:
        hwit = Homotopy(Y, Y, tuple(data.homotopy_comps))
    except Exception as exc:
        return False, f"retract homotopy is malformed ({exc})"
    diff = map_sub(compose(proj, lift), map_scal(data.multiplier, identity_map(Y)))
    if not homotopy_realizes(hwit, diff):
        return False, "retract homotopy does not re-validate"
    return True, "ok"


def verify_certificate(cert: MembershipCertificate, D: GeneratorSet, Y: Complex):
    """Typed-certificate verification; delegates to verify_certificate_data."""
    return verify_certificate_data(certificate_data(cert), D, Y)


# ---------------------------------------------------------------------------
# the semi-decision procedure


@dataclass(frozen=True)
class StageDiagnostics:
    stage: int
    hom_summary: str  # Hom_K(Y, Y_n)
    alpha_class_zero: bool
    alpha_class_order: int | None
    stationary: bool
    top_total_rank: int


@dataclass(frozen=True)
class TowerReport:
    verdict: str  # "member" | "undetermined"
    stage: int | None
    certificate: MembershipCertificate | None
    diagnostics: tuple[StageDiagnostics, ...]
    stationary: bool
    prime: int | None = None

    @property
    def is_member(self) -> bool:
        return self.verdict == "member"


def _global_death_test(f: ChainMap, hom: HomSpace):
    h = null_homotopy(f)
    if h is None:
        return None
    return 1, h


def check_membership(
    D: GeneratorSet,
    Y: Complex,
    max_stages: int,
    death_test=_global_death_test,
    prime: int | None = None,
) -> TowerReport:
    """Run the tower for up to max_stages; Member verdicts always carry a
    freshly verified certificate.  Undetermined is a verdict, not an error."""
    if max_stages < 1:
        raise ValueError("max_stages must be >= 1")
    state = TowerState(D, Y)
    diags = []

    endo = hom_space(Y, Y)
    ident = identity_map(Y)
    witness = death_test(ident, endo)
    diags.append(
        StageDiagnostics(
            0,
            endo.rank_summary,
            endo.zero_class(ident),
            endo.class_order(ident),
            False,
            Y.total_rank,
        )
    )
    if witness is not None:
        s, h = witness
        cert = extract_certificate(state, 0, h, multiplier=s, prime=prime)
        return TowerReport("member", 0, cert, tuple(diags), False, prime)

    stationary = False
    for n in range(1, max_stages + 1):
        state = tower_step(state)
        stage = state.stages[-1]
        hom = hom_space(Y, state.top)
        alpha0 = state.alpha0
        order = hom.class_order(alpha0)
        zero = hom.zero_class(alpha0)
        diags.append(
            StageDiagnostics(
                n, hom.rank_summary, zero, order, stage.stationary, state.top.total_rank
            )
        )
        witness = death_test(alpha0, hom)
        if witness is not None:
            s, h = witness
            cert = extract_certificate(state, n, h, multiplier=s, prime=prime)
            return TowerReport("member", n, cert, tuple(diags), False, prime)
        if stage.stationary:
            stationary = True
            break
    return TowerReport("undetermined", None, None, tuple(diags), stationary, prime)


# ---------------------------------------------------------------------------
# separating-functor tables


@dataclass(frozen=True)
class FunctorCell:
    probe: int
    stage: int
    summary: str
    connecting_zero: bool | None  # None at the last computed stage
    connecting_rank: int | None


def functor_values(state: TowerState, probes: list[Complex]) -> list[FunctorCell]:
    """Stagewise Hom(T, Y_n) summaries with the rank of each connecting map.

    In integer mode the connecting rank counts the generators of the image
    subgroup; in field mode it is the matrix rank over F_p.
    """
    cells = []
    tops = [state.Y] + [st.top for st in state.stages]
    alphas = [st.alpha for st in state.stages]
    for t, T in enumerate(probes):
        if T.ctx != state.Y.ctx:
            raise ValueError("probe lives over a different context")
        spaces = [hom_space(T, top) for top in tops]
        for n, H in enumerate(spaces):
            if n < len(alphas):
                M = induced_matrix(H, alphas[n], spaces[n + 1])
                zero = all(v == 0 for row in M for v in row)
                rank = _connecting_rank(M, spaces[n + 1])
            else:
                zero, rank = None, None
            cells.append(FunctorCell(t, n, H.rank_summary, zero, rank))
    return cells


def _connecting_rank(M, target: HomSpace) -> int:
    rows = len(M)
    cols = len(M[0]) if rows else 0
    if rows == 0 or cols == 0:
        return 0
    if target.mode == "field":
        r, _, _ = rref_field(np.array(M, dtype=np.int64), FieldSpec(target.ctx.p))
        return r
    img = image_subgroup(M, target)
    return len(img.invariant_factors) + img.free_rank


def image_subgroup(M, target: HomSpace):
    """Structure of the subgroup of the target group generated by the
    columns of M (columns are normal-form coordinate vectors)."""
    rows = len(M)
    cols = len(M[0]) if rows else 0
    torsion = list(target.group.invariant_factors)
    nt = len(torsion)
    # kernel of Z^cols -> target group: M x = 0 modulo the relation lattice
    stacked = []
    for i in range(rows):
        rel_row = [0] * nt
        if i < nt:
            rel_row[i] = torsion[i]
        stacked.append([M[i][j] for j in range(cols)] + rel_row)
    solver = IntSolver(stacked, cols=cols + nt)
    K = solver.kernel_basis()
    rels = []
    z = len(K[0]) if K else 0
    for j in range(z):
        rels.append([K[i][j] for i in range(cols)])
    return abelian_group(rels, generators=cols).group


# ---------------------------------------------------------------------------
# the brute-force oracle


@dataclass
class OracleOutcome:
    member: bool
    pool: list[Complex] = field(default_factory=list)
    witness_through: Complex | None = None
    retraction: ChainMap | None = None
    section: ChainMap | None = None
    rounds: int = 0
    capped: bool = False


def _witness_equivalent(A: Complex, B: Complex, cap: int = 64, free_bound: int = 1) -> bool:
    """Search for mutually inverse homotopy classes; sound, bounded."""
    if A == B:
        return True
    if (A.total_rank == 0) != (B.total_rank == 0):
        return False
    HAB = hom_space(A, B)
    HBA = hom_space(B, A)
    EA = hom_space(A, A)
    EB = hom_space(B, B)
    if A.ctx.mode == "field":
        if HAB.dim == 0 or HBA.dim == 0 or EA.dim != EB.dim:
            return False
    else:
        if HAB.group.is_trivial or HBA.group.is_trivial:
            return False
        if EA.group != EB.group:
            return False
    ida = EA.coords(identity_map(A))
    idb = EB.coords(identity_map(B))
    try:
        cand_s = list(HAB.enumerate_classes(free_bound=free_bound, cap=cap))
        cand_r = list(HBA.enumerate_classes(free_bound=free_bound, cap=cap))
    except EnumerationCap:
        return False
    for s in cand_s:
        for r in cand_r:
            if EA.coords(compose(r, s)) == ida and EB.coords(compose(s, r)) == idb:
                return True
    return False


def _factor_identity_through_pool(Y: Complex, pool: list[Complex]):
    """Solve [id_Y] = sum of composites through pool objects exactly.

    Returns (section, retraction, through) or None; the witnesses are checked
    with verify_retract before being returned.
    """
    E = hom_space(Y, Y)
    idc = list(E.coords(identity_map(Y)))
    width = len(idc)
    if width == 0:
        return None
    products = []  # (pool object, s, r, coords)
    for P in pool:
        HyP = hom_space(Y, P)
        HPy = hom_space(P, Y)
        for s in HyP.generating_maps():
            for r in HPy.generating_maps():
                products.append((P, s, r, E.coords(compose(r, s))))
    if not products:
        return None
    cols = [list(c) for (_, _, _, c) in products]
    if Y.ctx.mode == "field":
        A = np.array(cols, dtype=np.int64).T
        sol = solve_field(A, idc, FieldSpec(Y.ctx.p))
        if sol is None:
            return None
        coeffs = [int(v) % Y.ctx.p for v in sol]
    else:
        torsion = list(E.group.invariant_factors)
        nt = len(torsion)
        rows = []
        for i in range(width):
            rel = [0] * nt
            if i < nt:
                rel[i] = torsion[i]
            rows.append([cols[j][i] for j in range(len(cols))] + rel)
        sol = IntSolver(rows, cols=len(cols) + nt).solve(idc)
        if sol is None:
            return None
        coeffs = [int(v) for v in sol[: len(cols)]]
    chosen = [(P, s, r, c) for (P, s, r, _), c in zip(products, coeffs) if c != 0]
    if not chosen:
        return None
    ctx = Y.ctx
    sources = [P for (P, _, _, _) in chosen]
    S, _, _ = direct_sum_many(sources)
    scomp = []
    rcomp = []
    for d in range(S.start, S.end):
        if S.rank(d) == 0:
            continue
        if Y.rank(d):
            blocks = [m.component(d) for (_, m, _, _) in chosen]
            scomp.append((d, mat_vstack(blocks, Y.rank(d))))
            rblocks = [mat_scal(ctx, c, m.component(d)) for (_, _, m, c) in chosen]
            rcomp.append((d, mat_hstack(rblocks, Y.rank(d))))
    section = ChainMap(Y, S, tuple(scomp))
    retraction = ChainMap(S, Y, tuple(rcomp))
    if verify_retract(section, retraction) is None:
        raise AssertionError("factorization solution failed retract verification")
    return section, retraction, S


def oracle_member(
    D: GeneratorSet,
    Y: Complex,
    max_depth: int = 3,
    max_total_rank: int = 12,
    class_cap: int = 512,
    free_bound: int = 2,
    pool_cap: int = 48,
) -> bool:
    """Bounded exhaustive envelope search, independent of the tower.

    True requires a verified retract witness.  False means: not found within
    the stated bounds (max_depth closure rounds, objects up to
    max_total_rank).  Raises BoundsExceeded when internal enumeration caps
    were hit without finding a witness, so False would not be exhaustive.
    """
    return oracle_search(
        D, Y, max_depth, max_total_rank, class_cap, free_bound, pool_cap
    ).member


def oracle_search(
    D: GeneratorSet,
    Y: Complex,
    max_depth: int = 3,
    max_total_rank: int = 12,
    class_cap: int = 512,
    free_bound: int = 2,
    pool_cap: int = 48,
) -> OracleOutcome:
    if any(e.ctx != Y.ctx for e in D.elements):
        raise ValueError("generators and target live over different contexts")
    out = OracleOutcome(member=False)
    if Y.is_zero or is_contractible(Y) is not None:
        out.member = True
        out.witness_through = zero_complex(Y.ctx)
        return out

    pool: list[Complex] = []
    capped = False

    def admit(X: Complex) -> bool:
        X = reduce_complex(X)
        if X.is_zero or X.total_rank > max_total_rank:
            return False
        for P in pool:
            if P == X or _witness_equivalent(P, X):
                return False
        pool.append(X)
        return True

    for e in D.elements:
        admit(e)

    def detect():
        found = _factor_identity_through_pool(Y, pool)
        if found:
            out.member = True
            out.section, out.retraction, out.witness_through = found
        return out.member

    if detect():
        out.pool = pool
        return out

    for depth in range(1, max_depth + 1):
        out.rounds = depth
        frontier = list(pool)
        grew = False
        for A in frontier:
            for B in frontier:
                H = hom_space(shift(B, -1), A)
                try:
                    classes = list(H.enumerate_classes(free_bound=free_bound, cap=class_cap))
                except EnumerationCap:
                    capped = True
                    continue
                for w in classes:
                    if len(pool) >= pool_cap:
                        capped = True
                        break
                    if admit(cone(w)[0]):
                        grew = True
                if len(pool) >= pool_cap:
                    break
            if len(pool) >= pool_cap:
                break
        if detect():
            out.pool = pool
            return out
        if not grew:
            break
    out.pool = pool
    out.capped = capped
    if capped:
        raise BoundsExceeded(
            f"enumeration caps hit after {out.rounds} rounds (pool size {len(pool)})"
        )
    return out
