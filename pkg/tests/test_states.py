import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from jordanlandau.claims import PASS
from jordanlandau.linalg import kron, random_hermitian, random_unitary, spectral_norm
from jordanlandau.states import (
    NotPositive,
    NotSelfAdjoint,
    ProductState,
    TraceNotOne,
    classify_product_purity,
    density_from_vector,
    expectation,
    is_pure,
    make_density,
    partial_trace,
    random_density,
    sqrt_psd,
    product_purity_check,
)


def proj(n, j):
    P = np.zeros((n, n), dtype=complex)
    P[j, j] = 1
    return P


def test_make_density_valid():
    rho = make_density(np.eye(4) / 4)
    assert rho.trace_defect <= 1e-15
    assert make_density(proj(3, 0)).min_eigenvalue == pytest.approx(0.0, abs=1e-15)


def test_make_density_errors():
    with pytest.raises(NotPositive) as exc:
        make_density(np.diag([1.2, -0.2]))
    assert exc.value.min_eigenvalue == pytest.approx(-0.2)
    with pytest.raises(TraceNotOne):
        make_density(np.diag([0.5, 0.4]))
    with pytest.raises(NotSelfAdjoint):
        make_density(np.array([[0.5, 0.1], [0.0, 0.5]]))


def test_density_from_vector_modes(rng):
    P = proj(4, 0)
    assert np.array_equal(density_from_vector(P, "hs").op, P)
    assert np.array_equal(density_from_vector(P, "jordan").op, P)
    B = (proj(4, 0) + proj(4, 1)) / np.sqrt(2)
    assert np.allclose(density_from_vector(B, "jordan").op, np.diag([0.5, 0.5, 0, 0]))
    with pytest.raises(ValueError):
        density_from_vector(np.zeros((3, 3)))
    with pytest.raises(NotSelfAdjoint):
        density_from_vector(np.array([[0, 1], [0, 0]], dtype=complex), "jordan")


def test_right_unitary_orbit(rng):
    B = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    base = density_from_vector(B, "hs").op
    for _ in range(10):
        U = random_unitary(rng, 5)
        assert spectral_norm(density_from_vector(B @ U, "hs").op - base) <= 1e-13


def test_expectation_examples(rng):
    rho = random_density(rng, 4)
    assert expectation(rho, np.eye(4)) == pytest.approx(1.0, abs=1e-14)
    A = random_hermitian(rng, 4)
    assert expectation(make_density(np.eye(4) / 4), A) == pytest.approx(np.trace(A).real / 4)
    N = np.diag(np.arange(4.0))
    assert expectation(make_density(proj(4, 0)), N) == 0.0


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_expectation_linear_and_monotone(seed):
    r = np.random.default_rng(seed)
    rho = random_density(r, 5)
    A, B = random_hermitian(r, 5), random_hermitian(r, 5)
    a, b = r.normal(size=2)
    lin = expectation(rho, a * A + b * B) - a * expectation(rho, A) - b * expectation(rho, B)
    assert abs(lin) <= 1e-12 * (1 + abs(a) * spectral_norm(A) + abs(b) * spectral_norm(B))
    G = r.normal(size=(5, 5))
    assert expectation(rho, G @ G.T) >= -1e-12


def test_sqrt_psd_examples(rng):
    P = proj(3, 1)
    assert np.allclose(sqrt_psd(make_density(P)), P, atol=1e-15)
    assert np.allclose(sqrt_psd(make_density(np.diag([0.25, 0.75]))), np.diag([0.5, np.sqrt(3) / 2]))
    rho = random_density(rng, 8)
    B = sqrt_psd(rho)
    assert spectral_norm(B @ B - rho.op) <= 1e-11


def test_is_pure_examples():
    pure, d = is_pure(make_density(proj(2, 0)))
    assert pure and abs(d) <= 1e-15
    pure, d = is_pure(make_density(np.eye(2) / 2))
    assert not pure and d == pytest.approx(0.5)
    pure, d = is_pure(make_density(np.diag([0.99, 0.01])))
    assert not pure and d == pytest.approx(0.0198)


@settings(max_examples=30, deadline=None)
@given(st.integers(min_value=0, max_value=2**32 - 1), st.integers(min_value=1, max_value=3))
def test_purity_iff_signed_projector(seed, rank):
    r = np.random.default_rng(seed)
    rho = random_density(r, 4, rank=rank)
    B = sqrt_psd(rho)
    sign = 1 if seed % 2 else -1
    pure, _ = is_pure(density_from_vector(sign * B, "jordan"))
    assert pure == (rank == 1)


def test_partial_trace_product(rng):
    rp, rm = random_density(rng, 4), random_density(rng, 3)
    joint = make_density(kron(rp.op, rm.op))
    assert spectral_norm(partial_trace(joint, (4, 3), "plus").op - rp.op) <= 1e-13
    assert spectral_norm(partial_trace(joint, (4, 3), "minus").op - rm.op) <= 1e-13


def test_partial_trace_symmetric_state():
    n = 3
    psi = np.zeros(n * n, dtype=complex)
    for j in range(n):
        psi[j * n + j] = 1 / np.sqrt(n)
    rho = make_density(np.outer(psi, psi.conj()))
    for keep in ("plus", "minus"):
        assert np.allclose(partial_trace(rho, (n, n), keep).op, np.eye(n) / n, atol=1e-15)


def test_partial_trace_preserves_trace_and_positivity(rng):
    G = rng.normal(size=(12, 12)) + 1j * rng.normal(size=(12, 12))
    rho = make_density(G @ G.conj().T / np.trace(G @ G.conj().T).real)
    red = partial_trace(rho, (3, 4), "minus")
    assert abs(np.trace(red.op) - 1) <= 1e-13
    assert red.min_eigenvalue >= -1e-11


def test_partial_trace_shape_errors():
    with pytest.raises(ValueError):
        partial_trace(make_density(np.eye(6) / 6), (4, 2))
    with pytest.raises(ValueError):
        partial_trace(make_density(np.eye(6) / 6), (3, 2), keep="left")


def test_product_purity_examples():
    pure = ProductState.of(make_density(proj(3, 0)), make_density(proj(3, 0)))
    c = classify_product_purity(pure)
    assert c.joint_pure and np.array_equal(c.projector_plus, proj(3, 0))
    assert "+-" in c.sign_ambiguity
    assert product_purity_check(pure).status == PASS
    mixed = ProductState.of(make_density(proj(2, 0)), make_density(np.eye(2) / 2))
    c = classify_product_purity(mixed)
    assert not c.joint_pure and not c.minus_pure and c.minus_defect == pytest.approx(0.5)
    assert product_purity_check(mixed).status == PASS
    flipped = kron(-proj(3, 0), -proj(3, 0))
    assert np.array_equal(flipped @ flipped, pure.joint.op)


def test_product_state_joint(rng):
    rp, rm = random_density(rng, 3), random_density(rng, 2)
    s = ProductState.of(rp, rm)
    assert s.dims == (3, 2)
    assert spectral_norm(s.joint.op - kron(rp.op, rm.op)) <= 1e-13
