import random

import pytest

from conetower.complexes import (
    cone,
    direct_sum,
    identity_map,
    shift,
    stalk,
    two_term,
    zero_complex,
)
from conetower.envelope import (
    GeneratorSet,
    LiftFailure,
    TowerState,
    certificate_data,
    check_membership,
    extract_certificate,
    functor_values,
    oracle_member,
    oracle_search,
    tower_step,
    verify_certificate,
    verify_certificate_data,
)
from conetower.homspace import hom_space, induced_matrix, null_homotopy

from helpers import F2, F3, ZCTX, cyclic_complex, f2_rank2_objects, random_complex

K0 = stalk(F2, 0)
K1 = shift(K0, 1)


# -- tower_step --------------------------------------------------------------


def test_stationary_when_hom_vanishes():
    # D = {k[0]}, Y = k[1]: Hom(k[0], k[1]) = 0, so Y_1 = Y_0 literally
    state = tower_step(TowerState(GeneratorSet((K0,)), K1))
    assert state.stages[0].stationary
    assert state.top == K1
    assert state.stages[0].alpha0.comps == identity_map(K1).comps


def test_identity_dies_at_stage_one():
    state = tower_step(TowerState(GeneratorSet((K0,)), K0))
    assert not state.stages[0].stationary
    assert null_homotopy(state.alpha0) is not None


def test_c4_detection_stage_frozen():
    # regression value from the first verified run: stage 2
    report = check_membership(GeneratorSet((cyclic_complex(2),)), cyclic_complex(4), 4)
    assert report.is_member
    assert report.stage == 2


# -- check_membership --------------------------------------------------------


def test_zero_target_member_at_stage_zero():
    report = check_membership(GeneratorSet((K0,)), zero_complex(F2), 3)
    assert report.is_member and report.stage == 0


def test_generator_member_at_stage_one():
    report = check_membership(GeneratorSet((K0,)), K0, 3)
    assert report.is_member and report.stage == 1


def test_shifted_stalk_undetermined_stationary():
    report = check_membership(GeneratorSet((K0,)), K1, 4)
    assert report.verdict == "undetermined"
    assert report.stationary
    assert all(d.hom_summary == "dim 1" for d in report.diagnostics)


def test_square_summand_detected():
    report = check_membership(GeneratorSet((K0,)), direct_sum(K0, K0)[0], 3)
    assert report.is_member and report.stage <= 2


def test_member_certificate_reverifies():
    D = GeneratorSet((cyclic_complex(2), cyclic_complex(3)))
    report = check_membership(D, cyclic_complex(6), 4)
    assert report.is_member
    ok, reason = verify_certificate(report.certificate, D, cyclic_complex(6))
    assert ok, reason


def test_contractible_target_stage_zero_certificate():
    C = cone(identity_map(two_term(ZCTX, 5, 0)))[0]
    D = GeneratorSet((cyclic_complex(2),))
    report = check_membership(D, C, 2)
    assert report.is_member and report.stage == 0
    ok, reason = verify_certificate(report.certificate, D, C)
    assert ok, reason


def test_extract_certificate_rejects_bad_witness():
    from conetower.complexes import Homotopy

    state = TowerState(GeneratorSet((K0,)), K0)
    state = tower_step(state)
    bad = Homotopy(K0, state.top, ())  # zero homotopy does not bound alpha0
    with pytest.raises(LiftFailure):
        extract_certificate(state, 1, bad)


def test_tampered_certificate_data_rejected():
    D = GeneratorSet((K0,))
    report = check_membership(D, direct_sum(K0, K0)[0], 3)
    data = certificate_data(report.certificate)
    data.xprime_ranks = tuple(r + 1 for r in data.xprime_ranks)
    ok, reason = verify_certificate_data(data, D, direct_sum(K0, K0)[0])
    assert not ok and "X'" in reason


def test_monotonicity_of_death():
    # once alpha_{0,N} dies it stays dead at later stages
    D = GeneratorSet((cyclic_complex(2),))
    Y = cyclic_complex(4)
    state = TowerState(D, Y)
    died_at = None
    for n in range(1, 5):
        state = tower_step(state)
        if null_homotopy(state.alpha0) is not None:
            died_at = n
            break
    assert died_at == 2
    for _ in range(2):
        state = tower_step(state)
        assert null_homotopy(state.alpha0) is not None


def test_one_step_death_random_towers():
    rng = random.Random(71)
    for run in range(6):
        ctx = rng.choice([F2, F3])
        D = GeneratorSet(
            tuple(random_complex(ctx, rng, 3) for _ in range(rng.randint(1, 2)))
        )
        Y = random_complex(ctx, rng, 3)
        state = TowerState(D, Y)
        for _ in range(3):
            prev = state.top
            state = tower_step(state)
            stage = state.stages[-1]
            if stage.stationary:
                break
            for e in D.elements:
                Hn = hom_space(e, prev)
                Hn1 = hom_space(e, stage.top)
                M = induced_matrix(Hn, stage.alpha, Hn1)
                assert all(v == 0 for row in M for v in row), (run, M)


# -- functor_values ----------------------------------------------------------


def test_functor_values_probe_death():
    D = GeneratorSet((K0,))
    Y = direct_sum(K0, K1)[0]
    state = TowerState(D, Y)
    for _ in range(2):
        state = tower_step(state)
        if state.stages[-1].stationary:
            break
    cells = functor_values(state, [K0, Y])
    by_key = {(c.probe, c.stage): c for c in cells}
    # the generator's connecting map is zero at every computed stage
    for (probe, stage), c in by_key.items():
        if probe == 0 and c.connecting_zero is not None:
            assert c.connecting_zero
    # stage 0 column records Hom(T, Y) itself
    assert by_key[(1, 0)].summary == "dim 2"


def test_functor_values_stationary_tower():
    D = GeneratorSet((K0,))
    state = tower_step(TowerState(D, K1))
    cells = functor_values(state, [K1])
    assert all(c.summary == "dim 1" for c in cells)


# -- oracle ------------------------------------------------------------------


def test_oracle_square_member():
    assert oracle_member(GeneratorSet((K0,)), direct_sum(K0, K0)[0], 2, 8)


def test_oracle_shift_not_member():
    assert not oracle_member(GeneratorSet((K0,)), K1, 3, 8)


def test_oracle_c4_member():
    assert oracle_member(GeneratorSet((cyclic_complex(2),)), cyclic_complex(4), 3, 8)


def test_oracle_c6_from_c2_c3():
    D = GeneratorSet((cyclic_complex(2), cyclic_complex(3)))
    assert oracle_member(D, cyclic_complex(6), 2, 8)


def test_oracle_retract_witnesses_verified():
    out = oracle_search(GeneratorSet((cyclic_complex(6),)), cyclic_complex(2), 2, 8)
    assert out.member
    assert out.section is not None and out.retraction is not None


def test_extension_closure_sanity():
    # members A, B and any tested connecting class w: cone(w) stays a member
    rng = random.Random(73)
    D = GeneratorSet((K0,))
    A = direct_sum(K0, K0)[0]
    B = K0
    HA = hom_space(shift(B, -1), A)
    for c in range(2**HA.dim):
        coords = tuple((c >> i) & 1 for i in range(HA.dim))
        w = HA.from_coords(coords)
        C = cone(w)[0]
        rep = check_membership(D, C, 6)
        assert rep.is_member, coords


def test_oracle_tower_agree_on_family():
    # spot check here; the full family runs in the acceptance suite
    objs = f2_rank2_objects()
    for e in objs[:3]:
        for Y in objs[:3]:
            tower = check_membership(GeneratorSet((e,)), Y, 6).is_member
            oracle = oracle_member(GeneratorSet((e,)), Y, 3, 8)
            assert tower == oracle, (e, Y)
