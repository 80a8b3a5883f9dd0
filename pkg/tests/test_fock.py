import numpy as np
import pytest

from jordanlandau.fock import (
    CompositeSpace,
    ModeSpec,
    annihilation,
    assert_on_safe,
    basis_projector,
    creation,
    embed,
    number,
    safe_projector,
)
from jordanlandau.linalg import adjoint, commutator, trace


def test_modespec_validation():
    with pytest.raises(ValueError):
        ModeSpec(3, 0)
    with pytest.raises(ValueError):
        ModeSpec(8, 5)
    assert ModeSpec(8, 4).max_safe_occupation == 3


def test_composite_dims():
    space = CompositeSpace((ModeSpec(5, 1), ModeSpec(6, 2)))
    assert space.dims == (5, 6)
    assert space.dim == 30


def test_annihilation_entries():
    a = annihilation(4)
    assert a[0, 1] == 1
    assert a[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(a) == 3


def test_creation_is_adjoint():
    assert np.array_equal(creation(7), adjoint(annihilation(7)))
    vac = np.zeros(7)
    vac[0] = 1
    assert np.array_equal(creation(7) @ vac, np.eye(7)[1])
    assert np.allclose(np.diag(number(7)), np.arange(7))


def test_ccr_on_safe_subspace():
    mode = ModeSpec(10, 1)
    a = annihilation(mode)
    space = CompositeSpace((mode,))
    assert assert_on_safe(commutator(a, adjoint(a)), np.eye(10), space) <= 1e-13
    # the full-space corner entry is -(n - 1)
    assert commutator(a, adjoint(a))[-1, -1] == pytest.approx(-9)


def test_margin_zero_detects_corner():
    space = CompositeSpace((ModeSpec(10, 0),))
    a = annihilation(10)
    assert assert_on_safe(commutator(a, adjoint(a)), np.eye(10), space) >= 1


def test_embed():
    space = CompositeSpace.uniform(2, 5, 1)
    a0, a1 = embed(annihilation(5), 0, space), embed(annihilation(5), 1, space)
    assert np.array_equal(a0 @ a1, a1 @ a0)
    assert np.array_equal(embed(np.eye(5), 1, space), np.eye(25))
    assert trace(embed(number(5), 0, space)) == pytest.approx(trace(number(5)) * 5)


def test_embed_slot_order():
    # slot 0 varies slowest
    space = CompositeSpace.uniform(2, 4, 1)
    n0 = embed(number(4), 0, space)
    assert np.allclose(np.diag(n0)[:8], [0, 0, 0, 0, 1, 1, 1, 1])


def test_embed_preserves_commutators(rng):
    space = CompositeSpace.uniform(2, 4, 1)
    A = rng.normal(size=(4, 4))
    B = rng.normal(size=(4, 4))
    lhs = embed(commutator(A, B), 1, space)
    rhs = commutator(embed(A, 1, space), embed(B, 1, space))
    assert np.allclose(lhs, rhs, atol=1e-14)


def test_safe_projector():
    assert np.array_equal(safe_projector(CompositeSpace((ModeSpec(6, 0),))), np.eye(6))
    P = safe_projector(CompositeSpace((ModeSpec(6, 2),)))
    assert np.array_equal(P, np.diag([1, 1, 1, 1, 0, 0]))
    assert np.array_equal(P @ P, P)
    a = annihilation(6)
    assert np.allclose(P @ commutator(a, adjoint(a)) @ P, P)


def test_safe_projector_two_modes():
    space = CompositeSpace.uniform(2, 6, 2)
    assert int(np.trace(safe_projector(space)).real) == 16


def test_degree_four_identity_needs_margin():
    # [a^2, a^dag^2] = 4N + 2 holds exactly on the safe subspace for margin >= 2
    a = annihilation(12)
    ad = adjoint(a)
    lhs = commutator(a @ a, ad @ ad)
    rhs = 4 * number(12) + 2 * np.eye(12)
    assert assert_on_safe(lhs, rhs, CompositeSpace((ModeSpec(12, 2),))) <= 1e-13
    assert assert_on_safe(lhs, rhs, CompositeSpace((ModeSpec(12, 0),))) > 0.1


def test_basis_projector():
    P = basis_projector(4, 2)
    assert P[2, 2] == 1 and np.count_nonzero(P) == 1
    assert basis_projector(4, 0, 3)[0, 3] == 1
