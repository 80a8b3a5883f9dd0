import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordanlandau.fock import number
from jordanlandau.linalg import (
    DimensionMismatchError,
    NotSelfAdjointError,
    adjoint,
    as_self_adjoint,
    eigh,
    expm,
    expm_hermitian,
    hs_inner,
    kron,
    psd_sqrt,
    random_hermitian,
    random_unitary,
    spectral_norm,
    trace,
)


def ket_bra(n, j, k):
    m = np.zeros((n, n), dtype=complex)
    m[j, k] = 1
    return m


def test_adjoint_examples():
    assert np.array_equal(adjoint(np.eye(4)), np.eye(4))
    assert np.array_equal(adjoint(1j * np.eye(2)), -1j * np.eye(2))
    assert np.array_equal(adjoint(np.array([[0, 1], [0, 0]])), np.array([[0, 0], [1, 0]]))


def test_adjoint_antihomomorphism(rng):
    A = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    B = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    # BLAS may round the two products differently; agreement is at round-off level
    assert spectral_norm(adjoint(A @ B) - adjoint(B) @ adjoint(A)) <= 1e-14 * spectral_norm(A @ B)


def test_trace_examples(rng):
    assert trace(np.eye(4)) == 4
    assert trace(ket_bra(3, 0, 1)) == 0
    A, B = random_hermitian(rng, 6), random_hermitian(rng, 6)
    assert abs(trace(A @ B) - trace(B @ A)) < 1e-12


def test_trace_cyclic(rng):
    A, B, C = (rng.normal(size=(7, 7)) + 1j * rng.normal(size=(7, 7)) for _ in range(3))
    scale = spectral_norm(A) * spectral_norm(B) * spectral_norm(C) * 7
    assert abs(trace(A @ B @ C) - trace(B @ C @ A)) <= 1e-12 * scale


def test_hs_inner():
    assert hs_inner(np.eye(3), np.eye(3)) == 3
    assert hs_inner(ket_bra(2, 0, 1), ket_bra(2, 0, 1)) == 1
    assert hs_inner(ket_bra(2, 0, 1), ket_bra(2, 1, 0)) == 0
    with pytest.raises(DimensionMismatchError):
        hs_inner(np.eye(2), np.eye(3))


def test_kron(rng):
    assert np.array_equal(kron(np.eye(2), np.eye(3)), np.eye(6))
    A, B = rng.normal(size=(3, 3)), rng.normal(size=(3, 3))
    I = np.eye(3)
    assert np.allclose(kron(A, I) @ kron(I, B), kron(A, B), atol=1e-14)
    assert np.isclose(trace(kron(A, B)), trace(A) * trace(B))


def test_eigh_examples(rng):
    assert np.allclose(eigh(np.diag([3.0, 1.0, 2.0])).eigenvalues, [1, 2, 3])
    assert np.allclose(eigh(number(5)).eigenvalues, np.arange(5))
    A = random_hermitian(rng, 32)
    s = eigh(A)
    assert spectral_norm(s.reconstruct() - A) / spectral_norm(A) <= 1e-11
    V = s.eigenvectors
    assert spectral_norm(adjoint(V) @ V - np.eye(32)) <= 1e-12


def test_eigh_deterministic_phases(rng):
    A = random_hermitian(rng, 10)
    V1, V2 = eigh(A).eigenvectors, eigh(A).eigenvectors
    assert np.array_equal(V1, V2)
    # the largest component of each eigenvector is real positive
    for v in V1.T:
        k = np.argmax(np.abs(v))
        assert v[k].real > 0 and abs(v[k].imag) < 1e-15


def test_eigh_rejects_non_hermitian():
    with pytest.raises(NotSelfAdjointError):
        eigh(np.array([[0, 1], [0, 0]], dtype=complex))


def test_expm_examples(rng):
    assert np.array_equal(expm(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(expm(1j * np.pi * np.diag([1.0, 0.0])), np.diag([-1, 1]), atol=1e-12)
    A = rng.normal(size=(8, 8)) + 1j * rng.normal(size=(8, 8))
    assert spectral_norm(expm(A) @ expm(-A) - np.eye(8)) <= 1e-10


def test_expm_paths_agree(rng):
    H = random_hermitian(rng, 12)
    assert spectral_norm(expm(-1j * 0.7 * H) - expm_hermitian(H, -0.7j)) <= 1e-11


def test_spectral_norm():
    assert spectral_norm(np.eye(5)) == pytest.approx(1.0)
    assert spectral_norm(np.diag([-3.0, 2.0])) == pytest.approx(3.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(min_value=1, max_value=12), st.integers(min_value=0, max_value=2**32 - 1))
def test_cstar_norm_property(n, seed):
    A = random_hermitian(np.random.default_rng(seed), n)
    assert abs(spectral_norm(A @ A) - spectral_norm(A) ** 2) <= 1e-10 * spectral_norm(A) ** 2


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=1, max_value=10), st.integers(min_value=0, max_value=2**32 - 1))
def test_hs_inner_positive(n, seed):
    r = np.random.default_rng(seed)
    A = r.normal(size=(n, n)) + 1j * r.normal(size=(n, n))
    assert hs_inner(A, A).real > 0


def test_as_self_adjoint_checks():
    with pytest.raises(NotSelfAdjointError):
        as_self_adjoint(np.array([[0, 1], [0, 0]]))
    assert np.array_equal(as_self_adjoint(np.eye(2)), np.eye(2))


def test_psd_sqrt(rng):
    G = rng.normal(size=(6, 6)) + 1j * rng.normal(size=(6, 6))
    P = G @ adjoint(G)
    R = psd_sqrt(P)
    assert spectral_norm(R @ R - P) <= 1e-11 * spectral_norm(P)
    with pytest.raises(ValueError):
        psd_sqrt(np.diag([1.0, -0.5]))


def test_random_unitary(rng):
    U = random_unitary(rng, 6)
    assert spectral_norm(adjoint(U) @ U - np.eye(6)) <= 1e-13
