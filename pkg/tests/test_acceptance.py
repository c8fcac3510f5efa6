"""Acceptance suite: one test per criterion, exact (tolerance-zero) checks.

Every test prints a `[PASS] criterion N` line so a full run reads as a
checklist.  Time limits are asserted, not just observed.
"""

import random
import time

import numpy as np

from conetower.cli import main
from conetower.complexes import (
    cone,
    direct_sum,
    direct_sum_many,
    identity_map,
    rotation_comparison,
    shift,
    stalk,
    two_term,
)
from conetower.envelope import (
    GeneratorSet,
    TowerState,
    check_membership,
    oracle_member,
    tower_step,
    verify_certificate,
)
from conetower.exactlin import FieldSpec, det_int, mat_mul_int, rref_field, snf
from conetower.homspace import hom_space, induced_matrix, is_contractible, verify_retract
from conetower.localize import check_membership_local, relevant_primes

from helpers import F2, F3, ZCTX, cyclic_complex, random_complex, random_int_matrix, random_map

INT_MANIFEST = "[category]\nmode = integer\n"
F2_MANIFEST = "[category]\nmode = field\np = 2\ndim = 1\nunit = [1]\n"


def _report(n, label, ok, elapsed, limit=None):
    mark = "PASS" if ok else "FAIL"
    extra = f" ({elapsed:.1f}s" + (f" < {limit}s)" if limit else ")")
    print(f"[{mark}] criterion {n}: {label}{extra}")
    assert ok, f"criterion {n} failed"
    if limit is not None:
        assert elapsed < limit, f"criterion {n} exceeded {limit}s ({elapsed:.1f}s)"


def test_criterion_1_smith_normal_form():
    rng = random.Random(10001)
    t0 = time.monotonic()
    ok = True
    for _ in range(200):
        m, n = rng.randint(1, 6), rng.randint(1, 6)
        A = random_int_matrix(rng, m, n, -9, 9)
        res = snf(A)
        U = [list(r) for r in res.U]
        D = [list(r) for r in res.D]
        V = [list(r) for r in res.V]
        if mat_mul_int(mat_mul_int(U, D), V) != A:
            ok = False
        if abs(det_int(U)) != 1 or abs(det_int(V)) != 1:
            ok = False
        nz = [d for d in res.diag if d]
        if any(b % a for a, b in zip(nz, nz[1:])):
            ok = False
    _report(1, "200 random SNF instances (A = UDV, unimodular, chain)", ok, time.monotonic() - t0, 10)


def _corpus(rng, count):
    out = []
    for i in range(count):
        ctx = F2 if i % 2 == 0 else F3
        out.append(random_complex(ctx, rng, 6))
    return out


def test_criterion_2_cones_and_rotation():
    rng = random.Random(10002)
    t0 = time.monotonic()
    corpus = _corpus(rng, 50)
    ok = True
    for X in corpus:
        if is_contractible(cone(identity_map(X))[0]) is None:
            ok = False
    for X in corpus:
        Y = random_complex(X.ctx, rng, 6)
        f = random_map(rng, X, Y)
        phi, psi = rotation_comparison(f)
        if verify_retract(psi, phi) is None or verify_retract(phi, psi) is None:
            ok = False
    _report(
        2,
        "cone(id) contractible and rotation comparison invertible, 50 complexes",
        ok,
        time.monotonic() - t0,
        30,
    )


def test_criterion_3_cohomologicality():
    rng = random.Random(10003)
    t0 = time.monotonic()
    ok = True
    for _ in range(100):
        ctx = rng.choice([F2, F3])
        p = ctx.p
        X = random_complex(ctx, rng, 4)
        Y = random_complex(ctx, rng, 4)
        T = random_complex(ctx, rng, 4)
        f = random_map(rng, X, Y)
        C, incl, proj = cone(f)
        HX, HY, HC, HX1 = (hom_space(T, Z) for Z in (X, Y, C, shift(X, 1)))
        maps = [
            (induced_matrix(HX, f, HY), induced_matrix(HY, incl, HC), HY),
            (induced_matrix(HY, incl, HC), induced_matrix(HC, proj, HX1), HC),
        ]
        for A, B, mid in maps:
            Am = np.array(A, dtype=np.int64).reshape(len(A), len(A[0]) if A else 0)
            Bm = np.array(B, dtype=np.int64).reshape(len(B), len(B[0]) if B else 0)
            if Am.size and Bm.size and ((Bm @ Am) % p).any():
                ok = False
            rank_a = rref_field(Am, FieldSpec(p))[0] if Am.size else 0
            rank_b = rref_field(Bm, FieldSpec(p))[0] if Bm.size else 0
            mid_dim = len(mid.generating_maps())
            if rank_a != mid_dim - rank_b:
                ok = False
    _report(3, "exactness at both middle nodes, 100 random pairs", ok, time.monotonic() - t0, 60)


def test_criterion_4_one_step_death():
    rng = random.Random(10004)
    t0 = time.monotonic()
    ok = True
    for _ in range(20):
        ctx = rng.choice([F2, F3])
        D = GeneratorSet(tuple(random_complex(ctx, rng, 3) for _ in range(rng.randint(1, 2))))
        Y = random_complex(ctx, rng, 3)
        state = TowerState(D, Y)
        for _ in range(4):
            prev = state.top
            state = tower_step(state)
            stage = state.stages[-1]
            if stage.stationary:
                break
            for e in D.elements:
                M = induced_matrix(hom_space(e, prev), stage.alpha, hom_space(e, stage.top))
                if any(v for row in M for v in row):
                    ok = False
    _report(4, "one-step death on 20 random towers (4 stages)", ok, time.monotonic() - t0)


def _f2_family():
    k0 = stalk(F2, 0)
    k1 = stalk(F2, 1)
    generators = [
        k0,
        k1,
        direct_sum(k0, k1)[0],
        two_term(F2, (1,), 0),
        direct_sum(k0, k0)[0],
    ]
    targets = generators + [direct_sum_many([k0, k0, k1])[0]]
    return [(e, Y) for e in generators for Y in targets]


def test_criterion_5_oracle_agreement(tmp_path):
    t0 = time.monotonic()
    family = _f2_family()
    assert len(family) == 30
    ok = True
    manifest = tmp_path / "f2.cat"
    manifest.write_text(F2_MANIFEST)
    from conetower.formats import complex_document

    for i, (e, Y) in enumerate(family):
        D = GeneratorSet((e,))
        tower = check_membership(D, Y, 6)
        oracle = oracle_member(D, Y, 3, 10)
        if tower.is_member != oracle:
            ok = False
            print(f"  disagreement on instance {i}: tower={tower.is_member} oracle={oracle}")
        if tower.is_member:
            gen_f = tmp_path / f"g{i}.cx"
            tgt_f = tmp_path / f"y{i}.cx"
            gen_f.write_text(complex_document(e))
            tgt_f.write_text(complex_document(Y))
            out = tmp_path / f"r{i}.txt"
            cert = tmp_path / f"c{i}.cert"
            code = main(
                ["member", "-m", str(manifest), "-t", str(tgt_f), "-g", str(gen_f),
                 "--max-stages", "6", "--out", str(out), "--cert", str(cert)]
            )
            if code != 0:
                ok = False
            vcode = main(
                ["verify", "-m", str(manifest), "-t", str(tgt_f), "-g", str(gen_f),
                 "--certificate", str(cert)]
            )
            if vcode != 0:
                ok = False
    _report(5, "tower <=> oracle on the 30-instance F_2 family, certificates verified",
            ok, time.monotonic() - t0, 300)


def test_criterion_6_known_answers():
    t0 = time.monotonic()
    ok = True
    k0 = stalk(F2, 0)
    r = check_membership(GeneratorSet((k0,)), direct_sum(k0, k0)[0], 6)
    ok &= r.is_member and r.stage <= 2
    r = check_membership(GeneratorSet((k0,)), shift(k0, 1), 6)
    ok &= (r.verdict == "undetermined") and r.stationary
    r = check_membership(GeneratorSet((cyclic_complex(2),)), cyclic_complex(4), 6)
    ok &= r.is_member and r.stage <= 3 and r.stage == 2  # frozen regression value
    D = GeneratorSet((cyclic_complex(2), cyclic_complex(3)))
    r = check_membership(D, cyclic_complex(6), 6)
    ok &= r.is_member
    for p in (2, 3):
        rl = check_membership_local(D, cyclic_complex(6), p, 6)
        ok &= rl.is_member
    _report(6, "known-answer cases (k^2[0], k[1], C(4), C(6))", ok, time.monotonic() - t0)


def test_criterion_7_local_global():
    t0 = time.monotonic()
    ok = True
    Z0 = stalk(ZCTX, 0)
    member_instances = [
        (GeneratorSet((cyclic_complex(2),)), cyclic_complex(2)),
        (GeneratorSet((cyclic_complex(2), cyclic_complex(3))), cyclic_complex(6)),
        (GeneratorSet((cyclic_complex(2),)), cyclic_complex(4)),
        (GeneratorSet((cyclic_complex(2),)), cyclic_complex(8)),
        (GeneratorSet((cyclic_complex(2),)), direct_sum(cyclic_complex(2), cyclic_complex(2))[0]),
        (GeneratorSet((cyclic_complex(6),)), cyclic_complex(2)),
        (GeneratorSet((cyclic_complex(6),)), cyclic_complex(3)),
        (GeneratorSet((cyclic_complex(2), cyclic_complex(3))), cyclic_complex(12)),
        (GeneratorSet((Z0,)), direct_sum(Z0, Z0)[0]),
        (GeneratorSet((Z0,)), Z0),
    ]
    for i, (D, Y) in enumerate(member_instances):
        glob = check_membership(D, Y, 6)
        if not glob.is_member:
            ok = False
            print(f"  instance {i} unexpectedly undetermined")
            continue
        certified, reason = verify_certificate(glob.certificate, D, Y)
        if not certified:
            ok = False
        for p in relevant_primes(D, Y):
            loc = check_membership_local(D, Y, p, 6)
            if not loc.is_member or loc.stage > glob.stage:
                ok = False
                print(f"  instance {i} fails at p={p}")
    # designated counter-instance
    D = GeneratorSet((cyclic_complex(2),))
    Y = cyclic_complex(6)
    glob = check_membership(D, Y, 6)
    loc2 = check_membership_local(D, Y, 2, 6)
    loc3 = check_membership_local(D, Y, 3, 6)
    ok &= (not glob.is_member) and loc2.is_member and (loc3.verdict == "undetermined")
    _report(7, "local-global on 10 member instances + counter-instance", ok, time.monotonic() - t0)


def test_criterion_8_determinism_and_tamper(tmp_path):
    t0 = time.monotonic()
    ok = True
    (tmp_path / "int.cat").write_text(INT_MANIFEST)
    (tmp_path / "C4.cx").write_text("[complex]\n[module]\n-1 = 1\n0 = 1\n[d -1]\n[4]\n")
    (tmp_path / "C2.cx").write_text("[complex]\n[module]\n-1 = 1\n0 = 1\n[d -1]\n[2]\n")
    argv = [
        "member", "-m", str(tmp_path / "int.cat"), "-t", str(tmp_path / "C4.cx"),
        "-g", str(tmp_path / "C2.cx"), "--max-stages", "4",
        "--out", str(tmp_path / "r.txt"), "--cert", str(tmp_path / "c.cert"),
    ]
    ok &= main(list(argv)) == 0
    first = ((tmp_path / "r.txt").read_bytes(), (tmp_path / "c.cert").read_bytes())
    ok &= main(list(argv)) == 0
    second = ((tmp_path / "r.txt").read_bytes(), (tmp_path / "c.cert").read_bytes())
    ok &= first == second

    text = (tmp_path / "c.cert").read_text()
    tampered_rows = 0
    lines = text.splitlines()
    for i, line in enumerate(lines):
        s = line.strip()
        if s.startswith("[") and len(s) > 2 and (s[1].isdigit() or s[1] in "-("):
            mutated = list(lines)
            inner = s[1:-1].split(",")
            inner[0] = str(int(inner[0]) + 1)
            mutated[i] = "[" + ",".join(inner) + "]"
            (tmp_path / "bad.cert").write_text("\n".join(mutated) + "\n")
            code = main(
                ["verify", "-m", str(tmp_path / "int.cat"), "-t", str(tmp_path / "C4.cx"),
                 "-g", str(tmp_path / "C2.cx"), "--certificate", str(tmp_path / "bad.cert")]
            )
            if code != 3:
                ok = False
                print(f"  tamper at line {i} not rejected (exit {code})")
            tampered_rows += 1
    ok &= tampered_rows > 0
    _report(8, f"byte-identical reruns; all {tampered_rows} single-entry tampers rejected",
            ok, time.monotonic() - t0)
