import threading

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from helpers import random_hermitian
from oracles import taylor_expm
from regdyn.errors import DimMismatch, LevelOutOfRange, NotHermitian, ParamError, WrongKind
from regdyn.hamiltonians import (
    LatticeConfig,
    RotationPlan,
    commutator,
    diagonal_family,
    lattice_family,
    make_h,
    overlap_matrix,
    propagator,
    rotated_family,
)
from regdyn.spectral import make_spectrum


def test_diagonal_example(spec4):
    fam = diagonal_family(spec4, [0, 1, 2, 3])
    np.testing.assert_array_equal(fam.hamiltonian(2), np.diag([0, 1, 2, 0]))
    H = fam.hamiltonian(3)
    np.testing.assert_array_equal(H, H.conj().T)


def test_cutoff_out_of_range(spec4):
    fam = diagonal_family(spec4, [0, 1, 2, 3])
    with pytest.raises(LevelOutOfRange):
        fam.hamiltonian(4)


def test_coefficient_count_checked(spec4):
    with pytest.raises(DimMismatch):
        diagonal_family(spec4, [0, 1, 2])


def test_zero_angle_rotation_matches_diagonal(spec4):
    plan = RotationPlan.brickwall(4, 2, 0.0)
    rot = rotated_family(spec4, [0, 1, 2, 3], plan)
    diag = diagonal_family(spec4, [0, 1, 2, 3])
    for L in range(4):
        np.testing.assert_array_equal(rot.hamiltonian(L), diag.hamiltonian(L))


def test_h_rules(spec4):
    np.testing.assert_array_equal(make_h("zero", spec4), 0.0)
    np.testing.assert_array_equal(make_h("linear", spec4), [0, 1, 2, 3])
    np.testing.assert_allclose(make_h("poly", spec4, 2), [0, 1, 4, 9])
    np.testing.assert_allclose(make_h("exp", spec4), np.exp([1, 2, 3, 4]))
    np.testing.assert_allclose(make_h("bounded", spec4, 2.0), [0, 1, 4 / 3, 1.5])
    with pytest.raises(ParamError):
        make_h("cubic", spec4)


def test_propagator_zero_and_diagonal():
    np.testing.assert_array_equal(propagator(np.zeros((3, 3)), 1.3), np.eye(3))
    U = propagator(np.diag([0.4, -1.1]), 0.7)
    np.testing.assert_allclose(U, np.diag(np.exp(1j * 0.7 * np.array([0.4, -1.1]))), atol=1e-15)


def test_propagator_series_oracle(rng):
    H = random_hermitian(rng, 6)
    np.testing.assert_allclose(propagator(H, 0.7), taylor_expm(H, 0.7), atol=1e-9)


@given(st.integers(0, 10_000), st.floats(-3, 3), st.floats(-3, 3))
@settings(max_examples=25, deadline=None)
def test_propagator_unitary_and_group_law(seed, t, s):
    H = random_hermitian(np.random.default_rng(seed), 5, scale=2.0)
    U, V = propagator(H, t), propagator(H, s)
    assert np.abs(U.conj().T @ U - np.eye(5)).max() <= 1e-10
    np.testing.assert_allclose(U @ V, propagator(H, t + s), atol=1e-9)


def test_propagator_rejects_non_hermitian():
    with pytest.raises(NotHermitian):
        propagator(np.array([[0.0, 1.0], [0.0, 0.0]]), 1.0)


def test_single_givens_layer_overlaps():
    theta = 0.3
    spec = make_spectrum("shifted_integer", (1.0,), 4)
    plan = RotationPlan((((0, 1, theta),),))
    fam = rotated_family(spec, [0, 1, 2, 3], plan)
    ov = overlap_matrix(spec, fam)
    assert ov[0, 0] == pytest.approx(abs(np.cos(theta)), abs=1e-15)
    assert ov[1, 0] == pytest.approx(abs(np.sin(theta)), abs=1e-15)
    np.testing.assert_array_equal(ov[2:, 0], 0.0)


def test_overlap_needs_rotated(spec4):
    with pytest.raises(WrongKind):
        overlap_matrix(spec4, diagonal_family(spec4, [0, 1, 2, 3]))


def test_rotation_basis_orthonormal():
    V = RotationPlan.brickwall(9, 3, lambda m, i: 0.2 + 0.1 * i, shift=2).basis(9)
    np.testing.assert_allclose(V.T @ V, np.eye(9), atol=1e-14)
    B = RotationPlan.blaschke(0.4).basis(16)
    np.testing.assert_allclose(B.T @ B, np.eye(16), atol=1e-13)


def test_overlapping_rotations_rejected():
    with pytest.raises(ParamError):
        RotationPlan((((0, 1, 0.1), (1, 2, 0.1)),)).basis(3)


def test_diagonal_hamiltonians_commute():
    spec = make_spectrum("shifted_integer", (1.0,), 6)
    fam = diagonal_family(spec, np.exp(spec.values))
    assert np.abs(commutator(fam.hamiltonian(2), fam.hamiltonian(5))).max() <= 1e-14


def test_commutator_hand_example():
    C = commutator(np.diag([1.0, 2.0]), np.array([[0.0, 1.0], [0.0, 0.0]]))
    np.testing.assert_array_equal(C, [[0.0, -1.0], [0.0, 0.0]])


def test_nested_commutator():
    A = np.diag([1.0, 3.0])
    B = np.array([[0.0, 1.0], [0.0, 0.0]])
    np.testing.assert_array_equal(commutator(A, B, 3), (-2.0) ** 3 * B)


def test_rotated_hamiltonian_spectrum():
    spec = make_spectrum("shifted_integer", (1.0,), 8)
    fam = rotated_family(spec, np.arange(8.0), RotationPlan.brickwall(8, 2, np.pi / 5))
    w = np.linalg.eigvalsh(fam.hamiltonian(4))
    np.testing.assert_allclose(np.sort(w), np.sort([0, 1, 2, 3, 4, 0, 0, 0]), atol=1e-12)


def test_lattice_hamiltonian_hermitian_and_conserving():
    fam = lattice_family(LatticeConfig(4, (0.3, -0.2), 1.0, 0.5))
    S = np.diag(fam.spec.diagonal)
    for L in range(4):
        H = fam.hamiltonian(L)
        np.testing.assert_allclose(H, H.conj().T, atol=1e-15)
        assert np.abs(H @ S - S @ H).max() <= 1e-14


def test_lattice_pairing_breaks_conservation():
    fam = lattice_family(LatticeConfig(4, pairing=0.5))
    S = np.diag(fam.spec.diagonal)
    H = fam.hamiltonian(3)
    assert np.abs(H @ S - S @ H).max() > 0.1


def test_lattice_commutator_with_scale_operator():
    fam = lattice_family(LatticeConfig(4))
    ch = fam.chain
    S = np.diag(fam.spec.diagonal)
    for j in range(4):
        a = ch.a[j]
        lhs = S @ a - a @ S
        # S lowers by one on a_j, so [S, a_j] = -a_j = -(1 - N_j) a_j
        np.testing.assert_allclose(a @ S - S @ a, (np.eye(16) - ch.n[j]) @ a, atol=1e-12)
        np.testing.assert_allclose(lhs, -a, atol=1e-12)


def test_eigensystem_cache_threadsafe():
    spec = make_spectrum("shifted_integer", (1.0,), 12)
    fam = rotated_family(spec, np.arange(12.0), RotationPlan.brickwall(12, 2, 0.4))
    results = []

    def work():
        results.append(fam.eigensystem(5))

    threads = [threading.Thread(target=work) for _ in range(8)]
    for th in threads:
        th.start()
    for th in threads:
        th.join()
    assert all(r is results[0] for r in results)
    U = fam.propagator(5, 0.9)
    np.testing.assert_allclose(U, propagator(fam.hamiltonian(5), 0.9), atol=1e-12)
