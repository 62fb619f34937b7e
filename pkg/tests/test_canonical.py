"""Canonical forms: signed diagonalization and generic-form recovery.

rank2_canonical is search-based, so its tests are reconstruction based:
build a state from known parameters in a scrambled frame, recover, and
compare against the label-invariant data (angles and |x| components up to
the quotiented symmetries, plus the frame reproducing the family state).
"""

import math

import numpy as np
import pytest

from qpair import (
    GenericPure,
    NumericalInconsistencyError,
    PreconditionError,
    Rank2Params,
    RankTwo,
    TwoQubitState,
    construct_family,
    pure_canonical,
    random_state,
    rank2_canonical,
    to_density_matrix,
)
from qpair.canonical import CanonicalForm, apply_local, diagonalize_cross

from conftest import random_rotation


def _reassemble(form: CanonicalForm):
    return form.sign * form.o_ee @ np.diag(form.c) @ form.o_nn


def test_diagonalize_cross_reassembles(rng):
    for seed in range(10):
        state = random_state(seed)
        form = diagonalize_cross(state)
        assert np.allclose(_reassemble(form), state.C, atol=1e-12)
        assert form.c[0] >= form.c[1] >= form.c[2] >= 0
        assert np.allclose(form.o_ee.T @ form.o_ee, np.eye(3), atol=1e-12)
        assert np.allclose(form.o_nn.T @ form.o_nn, np.eye(3), atol=1e-12)
        assert np.linalg.det(form.o_ee) == pytest.approx(1.0, abs=1e-12)
        assert np.linalg.det(form.o_nn) == pytest.approx(1.0, abs=1e-12)
        det_c = np.linalg.det(state.C)
        assert form.sign == (1 if det_c >= 0 else -1)


def test_diagonalize_cross_sign_cases():
    neg = diagonalize_cross(
        TwoQubitState(s=np.zeros(3), t=np.zeros(3), C=np.diag([0.7, 0.4, -0.2]))
    )
    assert neg.sign == -1
    assert np.allclose(neg.c, [0.7, 0.4, 0.2], atol=1e-14)
    pos = diagonalize_cross(
        TwoQubitState(s=np.zeros(3), t=np.zeros(3), C=np.diag([0.7, 0.4, 0.2]))
    )
    assert pos.sign == 1
    assert np.allclose(pos.c, [0.7, 0.4, 0.2], atol=1e-14)


def test_apply_local_composition_and_invariance(rng):
    from qpair import local_invariants

    state = random_state(21)
    o_ee, o_nn = random_rotation(rng), random_rotation(rng)
    rotated = apply_local(state, o_ee, o_nn)
    assert np.allclose(rotated.s, o_ee @ state.s)
    assert np.allclose(rotated.t, o_nn.T @ state.t)
    assert np.allclose(rotated.C, o_ee @ state.C @ o_nn)
    # Spectrum is untouched.
    a = np.linalg.eigvalsh(to_density_matrix(state))
    b = np.linalg.eigvalsh(to_density_matrix(rotated))
    assert np.allclose(a, b, atol=1e-12)
    # Applying the inverse frame undoes the transformation.
    back = apply_local(rotated, o_ee.T, o_nn.T)
    assert np.allclose(back.as_vector(), state.as_vector(), atol=1e-12)
    with pytest.raises(ValueError, match="orthogonal"):
        apply_local(state, np.eye(3) + 0.01, np.eye(3))


def test_pure_canonical_recovers_p(rng):
    for p in (0.0, 0.35, 0.8, 1.0):
        base = construct_family(GenericPure(p))
        scrambled = apply_local(base, random_rotation(rng), random_rotation(rng))
        assert pure_canonical(scrambled) == pytest.approx(p, abs=1e-9)


def test_pure_canonical_requires_purity():
    with pytest.raises(PreconditionError, match="pure"):
        pure_canonical(random_state(3))


def test_pure_canonical_detects_inconsistent_input(monkeypatch):
    # Sneak past the purity gate with a state whose |s| != |t|.
    import qpair.canonical as canon

    from qpair.classify import PurityRank

    monkeypatch.setattr(canon, "purity_rank", lambda s, tol=1e-9: PurityRank(1, True))
    bad = TwoQubitState(s=[0.5, 0, 0], t=[0.1, 0, 0], C=np.diag([1.0, 0.5, 0.5]))
    with pytest.raises(NumericalInconsistencyError, match=r"\|t\|"):
        pure_canonical(bad)


def _scrambled(par, rng):
    return apply_local(
        construct_family(RankTwo(par)), random_rotation(rng), random_rotation(rng)
    )


def test_rank2_canonical_recovers_parameters(rng):
    par = Rank2Params(1.1, 0.4, 0.3, -0.25, 0.2)
    got, o_ee, o_nn = rank2_canonical(
        _scrambled(par, rng), restarts=4, return_frame=True
    )
    assert got.gamma1 == pytest.approx(par.gamma1, abs=1e-7)
    assert got.gamma2 == pytest.approx(par.gamma2, abs=1e-7)
    # The (pi, pi) z-rotation symmetry allows a joint sign flip of
    # (x1, x2); the canonical output fixes x1 > 0.
    assert got.x1 == pytest.approx(abs(par.x1), abs=1e-7)
    assert abs(got.x2) == pytest.approx(abs(par.x2), abs=1e-7)
    assert got.x3 == pytest.approx(par.x3, abs=1e-7)


def test_rank2_canonical_frame_reproduces_family_state(rng):
    par = Rank2Params(0.9, 0.55, 0.15, 0.3, -0.4)
    state = _scrambled(par, rng)
    got, o_ee, o_nn = rank2_canonical(state, restarts=4, return_frame=True)
    aligned = apply_local(state, o_ee, o_nn)
    family = construct_family(RankTwo(got))
    assert np.allclose(aligned.as_vector(), family.as_vector(), atol=1e-7)


def test_rank2_canonical_output_is_label_invariant(rng):
    # Two different scramblings of the same family state give the same
    # canonical labels.
    par = Rank2Params(1.2, 0.3, 0.0, 0.2, 0.5)
    a = rank2_canonical(_scrambled(par, rng), restarts=4)
    b = rank2_canonical(_scrambled(par, rng), restarts=4)
    assert a.gamma1 == pytest.approx(b.gamma1, abs=1e-7)
    assert a.gamma2 == pytest.approx(b.gamma2, abs=1e-7)
    assert a.x1 == pytest.approx(b.x1, abs=1e-7)
    assert abs(a.x2) == pytest.approx(abs(b.x2), abs=1e-7)
    assert a.x3 == pytest.approx(b.x3, abs=1e-7)


def test_rank2_canonical_quotients_sign_flip(rng):
    # The (pi, pi) z-rotation pair flips (x1, x2) jointly, so the flipped
    # parameters describe the same local orbit; canonicalization must land
    # both on the x1 > 0 representative.
    par = Rank2Params(1.0, 0.5, 0.2, 0.1, -0.3)
    flipped = Rank2Params(1.0, 0.5, -0.2, -0.1, -0.3)
    a = rank2_canonical(_scrambled(par, rng), restarts=4)
    b = rank2_canonical(_scrambled(flipped, rng), restarts=4)
    assert a.gamma1 == pytest.approx(b.gamma1, abs=1e-7)
    assert a.gamma2 == pytest.approx(b.gamma2, abs=1e-7)
    assert a.x1 == pytest.approx(b.x1, abs=1e-7)
    assert a.x2 == pytest.approx(b.x2, abs=1e-7)
    assert a.x3 == pytest.approx(b.x3, abs=1e-7)
    assert a.x1 > 0


def test_rank2_canonical_equal_angles(rng):
    par = Rank2Params(0.8, 0.8, 0.25, 0.0, 0.3)
    got = rank2_canonical(_scrambled(par, rng), restarts=8)
    assert got.gamma1 == pytest.approx(0.8, abs=1e-6)
    assert got.gamma2 == pytest.approx(0.8, abs=1e-6)


def test_rank2_canonical_requires_rank_two():
    with pytest.raises(PreconditionError, match="rank-2"):
        rank2_canonical(random_state(0))
    with pytest.raises(PreconditionError, match="rank-2"):
        rank2_canonical(random_state(0, target_rank=1))


def test_random_rank2_states_round_trip(rng):
    # Arbitrary rank-2 states (not built from the family) must also land
    # on a reproducing frame.
    for seed in (101, 202):
        state = random_state(seed, target_rank=2)
        got, o_ee, o_nn = rank2_canonical(state, restarts=8, return_frame=True)
        aligned = apply_local(state, o_ee, o_nn)
        family = construct_family(RankTwo(got))
        assert np.allclose(aligned.as_vector(), family.as_vector(), atol=1e-6)
