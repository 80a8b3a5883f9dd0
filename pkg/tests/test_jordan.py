import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordanlandau.fock import number
from jordanlandau.jordan import (
    LeftMult,
    associator,
    associator_via_double_commutator,
    decomposition_check,
    jb_axiom_report,
    jordan_basis,
    jordan_identity_residual,
    jordan_module_axioms,
    jordan_product,
    left_commutator_apply,
    left_commutator_superop,
    representation_axioms,
)
from jordanlandau.linalg import commutator, random_hermitian, spectral_norm

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]])

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def herm(seed, n, k=1):
    r = np.random.default_rng(seed)
    return [random_hermitian(r, n) for _ in range(k)]


def test_jordan_product_examples(rng):
    A = random_hermitian(rng, 5)
    assert np.allclose(jordan_product(A, np.eye(5)), A, atol=1e-15)
    assert np.allclose(jordan_product(A, A), A @ A, atol=1e-14)
    assert np.array_equal(jordan_product(SIGMA_X, SIGMA_Y), np.zeros((2, 2)))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 4, 8, 16]), seeds)
def test_commutativity_bit_exact(n, seed):
    A, B = herm(seed, n, 2)
    assert np.array_equal(jordan_product(A, B), jordan_product(B, A))


@settings(max_examples=50, deadline=None)
@given(st.sampled_from([2, 4, 8, 16]), seeds)
def test_jordan_identity(n, seed):
    A, B = herm(seed, n, 2)
    assert jordan_identity_residual(A, B) <= 1e-12


def test_jordan_identity_diagonal_exact():
    A, B = np.diag([1.0, 2.0, -3.0]), np.diag([0.5, 4.0, 1.0])
    assert jordan_identity_residual(A, B) == 0.0


def test_associator_examples(rng):
    A, B, C = (random_hermitian(rng, 6) for _ in range(3))
    scale = spectral_norm(A) * spectral_norm(B) * spectral_norm(C)
    assert spectral_norm(associator(A, B, A)) <= 1e-13 * scale
    assert spectral_norm(associator(np.eye(6), B, C)) <= 1e-13 * scale
    assert spectral_norm(associator(A, B, C) + associator(C, B, A)) <= 1e-13 * scale


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([2, 4, 8]), seeds)
def test_associator_double_commutator(n, seed):
    A, B, C = herm(seed, n, 3)
    scale = spectral_norm(A) * spectral_norm(B) * spectral_norm(C)
    d = associator(A, B, C) - associator_via_double_commutator(A, B, C)
    assert spectral_norm(d) <= 1e-13 * scale


def test_double_commutator_commuting():
    A, C = np.diag([1.0, 2.0]), np.diag([3.0, -1.0])
    assert np.array_equal(associator_via_double_commutator(A, SIGMA_X, C), np.zeros((2, 2)))


def test_jb_report(rng):
    A, B = random_hermitian(rng, 6), random_hermitian(rng, 6)
    r = jb_axiom_report(A, B)
    assert r.c_star <= 1e-12
    assert r.product_satisfied
    assert jb_axiom_report(A, A).positivity_satisfied


def test_jb_sweep_worst_margins():
    r = np.random.default_rng(7)
    worst_pos = worst_prod = np.inf
    for _ in range(1000):
        A, B = random_hermitian(r, 4), random_hermitian(r, 4)
        rep = jb_axiom_report(A, B)
        worst_pos = min(worst_pos, rep.positivity_margin)
        worst_prod = min(worst_prod, rep.product_margin)
    # the printed asymmetric condition never fails for self-adjoint pairs
    assert worst_pos >= -1e-12
    assert worst_prod >= -1e-12


def test_basis_small_cases():
    b1 = jordan_basis(1, "paper")
    assert len(b1.elements) == 1 and np.array_equal(b1.elements[0], np.ones((1, 1)))
    b2 = jordan_basis(2, "paper")
    assert np.allclose(b2.gram(), np.diag([1, 1, 0.5, 0.5]), atol=1e-15)
    assert np.allclose(jordan_basis(4).gram(), np.eye(16), atol=1e-12)


def test_basis_reconstruction(rng):
    for mode in ("paper", "orthonormal"):
        basis = jordan_basis(4, mode)
        A = random_hermitian(rng, 4)
        assert spectral_norm(basis.reconstruct(basis.coefficients(A)) - A) <= 1e-13


def test_basis_real_independence():
    basis = jordan_basis(3)
    M = np.array([np.concatenate([e.real.ravel(), e.imag.ravel()]) for e in basis.elements])
    assert np.linalg.matrix_rank(M) == 9


def test_module_axioms(rng):
    A, B, w = (random_hermitian(rng, 6) for _ in range(3))
    assert max(jordan_module_axioms(A, B, w)) <= 1e-12
    assert max(jordan_module_axioms(np.eye(6), B, w)) <= 1e-15
    w0 = jordan_basis(5, "paper").elements[7]
    assert max(jordan_module_axioms(number(5), random_hermitian(rng, 5), w0)) <= 1e-12


def test_representation_axioms(rng):
    assert max(representation_axioms(np.diag([1.0, 2.0]), np.diag([0.0, 3.0]))) == 0.0
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    assert max(representation_axioms(A, B)) <= 1e-12


def test_leftmult_matches_product(rng):
    A, B = random_hermitian(rng, 4), random_hermitian(rng, 4)
    L = LeftMult(A)
    assert L.materialized
    assert np.array_equal(L(B), jordan_product(A, B))
    assert np.allclose(L.apply_vec(B.reshape(-1)).reshape(4, 4), jordan_product(A, B), atol=1e-14)
    assert not LeftMult(random_hermitian(rng, 33)).materialized


def test_decomposition_check(rng):
    A, B = random_hermitian(rng, 5), random_hermitian(rng, 5)
    H = 1j * commutator(A, B)
    assert decomposition_check(H, [(A, B)]) <= 1e-13
    assert decomposition_check(H, []) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        decomposition_check(H, [(A, A + 1j * B)])


def test_left_commutator_forms(rng):
    S, R, v = (random_hermitian(rng, 5) for _ in range(3))
    scale = spectral_norm(S) * spectral_norm(R) * spectral_norm(v)
    D = left_commutator_apply(S, R, v)
    assert spectral_norm(left_commutator_apply(S, S, v)) <= 1e-13 * scale
    assert spectral_norm(D - associator(R, v, S)) <= 1e-13 * scale
    assert spectral_norm(D - 0.25 * commutator(v, commutator(R, S))) <= 1e-13 * scale
    M = left_commutator_superop([(S, R)])
    assert np.allclose((M @ v.reshape(-1)).reshape(5, 5), D, atol=1e-13 * scale)


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_inner_derivation(seed):
    S, R, A, B = herm(seed, 4, 4)

    def D(X):
        return left_commutator_apply(S, R, X)

    lhs = D(jordan_product(A, B))
    rhs = jordan_product(D(A), B) + jordan_product(A, D(B))
    scale = np.prod([spectral_norm(X) for X in (S, R, A, B)])
    assert spectral_norm(lhs - rhs) <= 1e-12 * scale
