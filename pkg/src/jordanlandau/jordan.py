"""Jordan product, associators, left multiplications and axiom residuals.

Elements of the Jordan algebra are self-adjoint operators (plain arrays);
the product is the symmetrized matrix product.  Residual functions return
nonnegative reals normalized by an operator scale so the caller can compare
against a unit-free tolerance.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Iterable, Sequence

import numpy as np

from .linalg import (
    check_same_dim,
    commutator,
    hermiticity_defect,
    identity,
    spectral_norm,
)

MATERIALIZE_MAX_DIM = 32


def jordan_product(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    """``A . B = (AB + BA) / 2``; bit-exactly commutative (floating-point addition is)."""
    check_same_dim(A, B)
    return 0.5 * (A @ B + B @ A)


def associator(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``(A.B).C - A.(B.C)``."""
    return jordan_product(jordan_product(A, B), C) - jordan_product(A, jordan_product(B, C))


def associator_via_double_commutator(A: np.ndarray, B: np.ndarray, C: np.ndarray) -> np.ndarray:
    """``[B, [A, C]] / 4``, equal to the associator in a special Jordan algebra."""
    check_same_dim(A, B, C)
    return 0.25 * commutator(B, commutator(A, C))


def _scale(*ops: np.ndarray) -> float:
    s = 1.0
    for op in ops:
        s *= max(spectral_norm(op), 1e-300)
    return s


def jordan_identity_residual(A: np.ndarray, B: np.ndarray) -> float:
    """``||(A.B).A^2 - A.(B.A^2)|| / (||A||^3 ||B||)``."""
    check_same_dim(A, B)
    A2 = A @ A
    lhs = jordan_product(jordan_product(A, B), A2)
    rhs = jordan_product(A, jordan_product(B, A2))
    if not np.any(A) or not np.any(B):
        return 0.0
    return spectral_norm(lhs - rhs) / _scale(A, A, A, B)


@dataclass(frozen=True)
class JBReport:
    """Margins of the three norm conditions; a positive margin means satisfied.

    ``c_star`` is the relative defect of ``||A^2|| = ||A||^2`` (an equality,
    so it is reported as a residual rather than a margin).
    """

    c_star: float
    positivity_margin: float
    product_margin: float

    @property
    def positivity_satisfied(self) -> bool:
        return self.positivity_margin >= -1e-12

    @property
    def product_satisfied(self) -> bool:
        return self.product_margin >= -1e-12


def jb_axiom_report(A: np.ndarray, B: np.ndarray) -> JBReport:
    """Evaluate the JB norm conditions on a pair of self-adjoint operators.

    The second condition is evaluated in the asymmetric form
    ``||A^2 - B^2|| <= max(||A^2||, ||B||^2)``.
    """
    check_same_dim(A, B)
    nA, nB = spectral_norm(A), spectral_norm(B)
    nA2 = spectral_norm(A @ A)
    c_star = abs(nA2 - nA**2) / max(nA**2, 1e-300)
    positivity = max(nA2, nB**2) - spectral_norm(A @ A - B @ B)
    product = nA * nB - spectral_norm(jordan_product(A, B))
    scale = max(nA**2, nB**2, nA * nB, 1e-300)
    return JBReport(c_star, positivity / scale, product / scale)


def jordan_module_axioms(A: np.ndarray, B: np.ndarray, w: np.ndarray) -> tuple[float, float, float]:
    """Residuals of the three Jordan-module identities for ``w`` over ``A``, ``B``.

    1. ``A.w = w.A``
    2. ``A^2.(A.w) = A.(A^2.w)``
    3. ``2A.(B.(A.w)) + (B.A^2).w = 2(A.B).(A.w) + A^2.(B.w)``
    """
    check_same_dim(A, B, w)
    jp = jordan_product
    A2 = A @ A
    r1 = spectral_norm(jp(A, w) - jp(w, A)) / _scale(A, w)
    r2 = spectral_norm(jp(A2, jp(A, w)) - jp(A, jp(A2, w))) / _scale(A, A, A, w)
    lhs = 2 * jp(A, jp(B, jp(A, w))) + jp(jp(B, A2), w)
    rhs = 2 * jp(jp(A, B), jp(A, w)) + jp(A2, jp(B, w))
    r3 = spectral_norm(lhs - rhs) / _scale(A, A, B, w)
    return r1, r2, r3


class LeftMult:
    """The superoperator ``L_A : v -> A.v``.

    Below ``MATERIALIZE_MAX_DIM`` the ``dim^2 x dim^2`` matrix is built
    (row-major vectorization, ``vec(AXB) = (A kron B^T) vec(X)``); above it
    only the closure is available.
    """

    def __init__(self, generator: np.ndarray, materialize: bool | None = None):
        self.generator = generator
        self.dim = generator.shape[0]
        if materialize is None:
            materialize = self.dim <= MATERIALIZE_MAX_DIM
        self.materialized = materialize
        self._matrix = self._build_matrix() if materialize else None

    def _build_matrix(self) -> np.ndarray:
        I = identity(self.dim)
        A = self.generator
        return 0.5 * (np.kron(A, I) + np.kron(I, A.T))

    @property
    def matrix(self) -> np.ndarray:
        if self._matrix is None:
            self._matrix = self._build_matrix()
            self.materialized = True
        return self._matrix

    def __call__(self, v: np.ndarray) -> np.ndarray:
        return jordan_product(self.generator, v)

    def apply_vec(self, vec: np.ndarray) -> np.ndarray:
        return self.matrix @ vec


def superop_jordan(S: np.ndarray, T: np.ndarray) -> np.ndarray:
    """Jordan product of two superoperator matrices (half anticommutator of composition)."""
    return 0.5 * (S @ T + T @ S)


def representation_axioms(A: np.ndarray, B: np.ndarray) -> tuple[float, float]:
    """Residuals of the two Jordan-representation identities for ``X -> L_X``.

    The first is checked both as a superoperator Jordan product (where it is
    immediate from commutativity) and as a composition
    ``L_{A^2} L_A = L_A L_{A^2}``; the larger residual is returned.  The
    five-term identity is evaluated with composition, which is the operator
    form of the third module identity.
    """
    check_same_dim(A, B)
    L = lambda X: LeftMult(X, materialize=True).matrix  # noqa: E731
    A2 = A @ A
    LA, LB, LA2 = L(A), L(B), L(A2)
    first_j = superop_jordan(LA2, LA) - superop_jordan(LA, LA2)
    first_c = LA2 @ LA - LA @ LA2
    s1 = _scale(A, A, A)
    r1 = max(spectral_norm(first_j), spectral_norm(first_c)) / s1
    lhs = 2 * LA @ LB @ LA + L(jordan_product(B, A2))
    rhs = 2 * L(jordan_product(A, B)) @ LA + LA2 @ LB
    r2 = spectral_norm(lhs - rhs) / _scale(A, A, B)
    return r1, r2


def decomposition_check(
    H: np.ndarray,
    pairs: Sequence[tuple[np.ndarray, np.ndarray]],
    compress: Callable[[np.ndarray], np.ndarray] | None = None,
) -> float:
    """Relative residual of ``H = i sum_j [L_j, R_j]``.

    ``compress`` optionally restricts both sides (e.g. to a safe subspace)
    before the norms are taken.  Each ``i[L, R]`` is checked to be
    self-adjoint; non-self-adjoint pairs raise ``ValueError``.
    """
    total = np.zeros_like(H)
    for HL, HR in pairs:
        term = 1j * commutator(HL, HR)
        if hermiticity_defect(term) > 1e-12:
            raise ValueError("i[H_L, H_R] is not self-adjoint; pair members must be self-adjoint")
        total = total + term
    if compress is None:
        compress = lambda X: X  # noqa: E731
    denom = spectral_norm(compress(H))
    if denom == 0.0:
        return spectral_norm(compress(total))
    return spectral_norm(compress(H - total)) / denom


def left_commutator_apply(S: np.ndarray, R: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``[L_S, L_R] v = S.(R.v) - R.(S.v)``, the inner derivation generated by ``(S, R)``."""
    check_same_dim(S, R, v)
    return jordan_product(S, jordan_product(R, v)) - jordan_product(R, jordan_product(S, v))


def left_commutator_superop(pairs: Iterable[tuple[np.ndarray, np.ndarray]]) -> np.ndarray:
    """Materialized ``sum_k [L_{S_k}, L_{R_k}]`` for ``(S_k, R_k)`` pairs."""
    total = None
    for S, R in pairs:
        LS, LR = LeftMult(S, True).matrix, LeftMult(R, True).matrix
        term = LS @ LR - LR @ LS
        total = term if total is None else total + term
    return total


# --- real Jordan-Hilbert basis ------------------------------------------------


@dataclass(frozen=True)
class JordanBasis:
    """Real basis of the self-adjoint ``n x n`` operators.

    ``normalization`` is ``"paper"`` (off-diagonal families with factor 1/2,
    trace norm squared 1/2) or ``"orthonormal"`` (off-diagonal families
    rescaled by sqrt(2)).
    """

    elements: tuple[np.ndarray, ...]
    normalization: str

    @property
    def dim(self) -> int:
        return self.elements[0].shape[0]

    def gram(self) -> np.ndarray:
        """Gram matrix under ``<A|B> = tr(A.B)``."""
        E = np.array(self.elements)
        # tr(A.B) = tr(AB) for self-adjoint A, B
        return np.real(np.einsum("iab,jba->ij", E, E))

    def coefficients(self, A: np.ndarray) -> np.ndarray:
        """Real expansion coefficients of a self-adjoint ``A``."""
        M = np.array([np.concatenate([e.real.ravel(), e.imag.ravel()]) for e in self.elements]).T
        rhs = np.concatenate([A.real.ravel(), A.imag.ravel()])
        coef, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        return coef

    def reconstruct(self, coef: np.ndarray) -> np.ndarray:
        return np.tensordot(coef, np.array(self.elements), axes=1)


def jordan_basis(n: int, normalization: str = "orthonormal") -> JordanBasis:
    """Diagonal projectors, then symmetric and antisymmetric off-diagonal families.

    Off-diagonal elements are indexed by ``j > k`` in lexicographic order.
    """
    if n < 1:
        raise ValueError("basis dimension must be >= 1")
    if normalization not in ("paper", "orthonormal"):
        raise ValueError(f"unknown normalization {normalization!r}")
    off = 0.5 if normalization == "paper" else 1 / np.sqrt(2)

    def ket_bra(j, k):
        m = np.zeros((n, n), dtype=np.complex128)
        m[j, k] = 1.0
        return m

    pairs = [(j, k) for j in range(n) for k in range(j)]
    diag = [ket_bra(j, j) for j in range(n)]
    sym = [off * (ket_bra(j, k) + ket_bra(k, j)) for j, k in pairs]
    anti = [1j * off * (ket_bra(j, k) - ket_bra(k, j)) for j, k in pairs]
    return JordanBasis(tuple(diag + sym + anti), normalization)


def is_self_adjoint(A: np.ndarray, tol: float = 1e-12) -> bool:
    return hermiticity_defect(A) <= tol

