import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bnl.fock import apply, basis_state, build_space, identity_operator
from bnl.gpauli import g_operator, stokes_operator
from bnl.modes import (
    BALANCED,
    ModeUnitary,
    conjugate,
    counterexample_report,
    expected_rotated_g3_block2,
    fock_lift,
)


def unitary_from_seed(seed):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    q, r = np.linalg.qr(z)
    return ModeUnitary(q * (np.diag(r) / np.abs(np.diag(r))))


def test_mode_unitary_validation():
    with pytest.raises(ValueError):
        ModeUnitary(np.array([[1, 1], [0, 1]], dtype=complex))
    with pytest.raises(ValueError):
        ModeUnitary(np.eye(3))
    ModeUnitary(np.eye(2))


def test_identity_lift_is_identity():
    space = build_space(3)
    lift = fock_lift(ModeUnitary(np.eye(2)), space)
    assert (lift - identity_operator(space)).max_abs() < 1e-14


def test_lift_preserves_vacuum():
    space = build_space(2)
    lift = fock_lift(ModeUnitary(BALANCED), space)
    out = apply(lift, basis_state(space, [(0, 0)]))
    assert out.amplitudes[0] == pytest.approx(1.0, abs=1e-14)


def test_balanced_lift_one_photon_block():
    space = build_space(2)
    lift = fock_lift(ModeUnitary(BALANCED), space)
    idx = [space.index[(1, 0)], space.index[(0, 1)]]
    block = lift.matrix[np.ix_(idx, idx)].toarray()
    want = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
    assert np.allclose(block, want, atol=1e-14)


@given(seed=st.integers(min_value=0, max_value=10**9))
@settings(max_examples=25, deadline=None)
def test_lift_is_unitary_per_block(seed):
    space = build_space(3)
    lift = fock_lift(unitary_from_seed(seed), space).matrix.toarray()
    assert np.allclose(lift.conj().T @ lift, np.eye(space.dim), atol=1e-10)


@given(seed=st.integers(min_value=0, max_value=10**9))
@settings(max_examples=25, deadline=None)
def test_lift_is_block_diagonal_in_total_photon_number(seed):
    space = build_space(3)
    lift = fock_lift(unitary_from_seed(seed), space).matrix.toarray()
    for r, occ_r in enumerate(space.basis):
        for c, occ_c in enumerate(space.basis):
            if occ_r.total != occ_c.total:
                assert lift[r, c] == 0


@given(seed=st.integers(min_value=0, max_value=10**9))
@settings(max_examples=20, deadline=None)
def test_lift_is_a_homomorphism(seed):
    space = build_space(3)
    u = unitary_from_seed(seed)
    v = unitary_from_seed(seed + 1)
    composed = fock_lift(u @ v, space)
    chained = fock_lift(u, space) @ fock_lift(v, space)
    assert (composed - chained).max_abs() < 1e-10


def test_conjugating_g0_fixes_one_photon_block():
    space = build_space(2)
    rotated = conjugate(g_operator(0, space), ModeUnitary(BALANCED))
    idx = space.block_indices(1)
    block = rotated.matrix[np.ix_(idx, idx)].toarray()
    assert np.allclose(block, np.eye(2), atol=1e-12)


def test_stokes_covariance_under_balanced_rotation():
    space = build_space(4)
    rotated = conjugate(stokes_operator(3, space), ModeUnitary(BALANCED))
    assert (rotated - stokes_operator(1, space)).max_abs() < 1e-12


def test_rotated_g3_two_photon_block_structure():
    space = build_space(2)
    rotated = conjugate(g_operator(3, space), ModeUnitary(BALANCED))
    idx = space.block_indices(2)
    block = rotated.matrix[np.ix_(idx, idx)].toarray()
    expected = expected_rotated_g3_block2()
    assert min(abs(block - expected).max(), abs(block + expected).max()) < 1e-12
    g1_block = g_operator(1, space).matrix[np.ix_(idx, idx)].toarray()
    assert abs(block - g1_block).max() > 0.5


def test_counterexample_report_default():
    report = counterexample_report()
    assert report.g_distance_block2 > 0.5
    assert report.g_distance_block1 < 1e-12
    assert report.stokes_distance < 1e-12
    assert report.matches_balanced_form


def test_counterexample_report_sign_flip_is_qualitatively_stable():
    report = counterexample_report(sign_flip=True)
    assert report.g_distance_block2 > 0.5
    assert report.g_distance_block1 < 1e-12
    assert report.stokes_distance < 1e-12


def test_counterexample_requires_two_photon_block():
    with pytest.raises(ValueError):
        counterexample_report(cutoff=1)


def test_report_serializes():
    payload = counterexample_report().to_dict()
    assert payload["g_distance_block2"] > 0.5
    assert len(payload["g_block2_real"]) == 3
