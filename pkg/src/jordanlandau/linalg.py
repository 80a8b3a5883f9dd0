"""Dense complex operator substrate.

Operators are plain ``numpy`` complex arrays of shape ``(dim, dim)``.  The
helpers here validate shape/finiteness, and supply the traces, inner
products, spectral decompositions and exponentials the rest of the package
builds on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg

HERMITICITY_TOL = 1e-12


class NotSelfAdjointError(ValueError):
    """Raised when an operator fails the self-adjointness check."""

    def __init__(self, defect: float):
        super().__init__(f"operator is not self-adjoint (relative defect {defect:.3e})")
        self.defect = defect


class DimensionMismatchError(ValueError):
    pass


class EigenDecompositionError(RuntimeError):
    pass


def as_operator(A) -> np.ndarray:
    """Return ``A`` as a square, finite complex128 array."""
    A = np.asarray(A, dtype=np.complex128)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError(f"operator must be a square matrix, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError("operator has non-finite entries")
    return A


def check_same_dim(*ops: np.ndarray) -> int:
    dims = {op.shape[0] for op in ops}
    if len(dims) != 1:
        raise DimensionMismatchError(f"operator dimensions differ: {sorted(dims)}")
    return dims.pop()


def identity(dim: int) -> np.ndarray:
    return np.eye(dim, dtype=np.complex128)


def adjoint(A: np.ndarray) -> np.ndarray:
    return np.conj(np.transpose(A))


def trace(A: np.ndarray) -> complex:
    return complex(np.trace(A))


def hs_inner(A: np.ndarray, B: np.ndarray) -> complex:
    """Hilbert-Schmidt inner product ``tr(A^dagger B)``."""
    check_same_dim(A, B)
    # sum of conj(A_ij) B_ij, avoids forming the product
    return complex(np.vdot(A, B))


def hs_norm(A: np.ndarray) -> float:
    return float(np.sqrt(max(hs_inner(A, A).real, 0.0)))


def kron(*ops: np.ndarray) -> np.ndarray:
    out = np.ones((1, 1), dtype=np.complex128)
    for op in ops:
        out = np.kron(out, op)
    return out


def commutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B - B @ A


def anticommutator(A: np.ndarray, B: np.ndarray) -> np.ndarray:
    return A @ B + B @ A


def spectral_norm(A: np.ndarray) -> float:
    """Largest singular value."""
    if A.size == 0:
        return 0.0
    return float(np.linalg.norm(A, 2))


def hermiticity_defect(A: np.ndarray) -> float:
    """``||A - A^dagger|| / ||A||`` in the spectral norm (0 for the zero operator)."""
    scale = spectral_norm(A)
    if scale == 0.0:
        return 0.0
    return spectral_norm(A - adjoint(A)) / scale


def as_self_adjoint(A, tol: float = HERMITICITY_TOL) -> np.ndarray:
    """Validate that ``A`` is self-adjoint to ``tol`` and return it.

    The returned array is the input itself, not a symmetrized copy, so that
    downstream identity checks see the operator exactly as constructed.
    """
    A = as_operator(A)
    defect = hermiticity_defect(A)
    if defect > tol:
        raise NotSelfAdjointError(defect)
    return A


@dataclass(frozen=True)
class Spectrum:
    """Ascending eigenvalues with phase-fixed orthonormal eigenvectors (columns)."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        V = self.eigenvectors
        return (V * self.eigenvalues) @ adjoint(V)


def _fix_phases(V: np.ndarray) -> np.ndarray:
    # largest-magnitude component made real positive; ties go to the lowest index
    mags = np.abs(V)
    peak = mags.max(axis=0)
    pivots = np.argmax(mags >= peak * (1.0 - 1e-12), axis=0)
    cols = np.arange(V.shape[1])
    pivot_vals = V[pivots, cols]
    return V * (np.conj(pivot_vals) / np.abs(pivot_vals))


def eigh(A: np.ndarray) -> Spectrum:
    """Spectral decomposition of a self-adjoint operator.

    Eigenvalues come back ascending and each eigenvector carries the phase
    convention of `_fix_phases`, so repeated calls are bit-identical.
    """
    A = as_self_adjoint(A)
    try:
        w, V = np.linalg.eigh(A)
    except np.linalg.LinAlgError as exc:  # pragma: no cover - LAPACK failure
        raise EigenDecompositionError(
            f"eigh did not converge for {A.shape[0]}x{A.shape[0]} operator "
            f"(norm {spectral_norm(A):.3e})"
        ) from exc
    return Spectrum(eigenvalues=w, eigenvectors=_fix_phases(V))


def expm(A: np.ndarray) -> np.ndarray:
    """Matrix exponential (scaling and squaring with Pade approximants)."""
    return scipy.linalg.expm(np.asarray(A, dtype=np.complex128))


def expm_hermitian(H: np.ndarray, coeff: complex) -> np.ndarray:
    """``exp(coeff * H)`` for self-adjoint ``H`` via its spectral decomposition."""
    spec = eigh(H)
    V = spec.eigenvectors
    return (V * np.exp(coeff * spec.eigenvalues)) @ adjoint(V)


def psd_sqrt(A: np.ndarray) -> np.ndarray:
    """Principal square root of a positive semidefinite operator.

    Eigenvalues in ``[-1e-12, 0)`` are treated as zero; anything more
    negative is an error.
    """
    spec = eigh(A)
    w = spec.eigenvalues
    if w.size and w[0] < -1e-12:
        raise ValueError(f"operator is not positive semidefinite (min eigenvalue {w[0]:.3e})")
    V = spec.eigenvectors
    return (V * np.sqrt(np.clip(w, 0.0, None))) @ adjoint(V)


def random_hermitian(rng: np.random.Generator, dim: int, scale: float = 1.0) -> np.ndarray:
    M = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return scale * (M + adjoint(M)) / 2


def random_unitary(rng: np.random.Generator, dim: int) -> np.ndarray:
    """Haar-distributed unitary via QR with the diagonal phase correction."""
    Z = (rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))) / np.sqrt(2)
    Q, R = np.linalg.qr(Z)
    d = np.diag(R)
    return Q * (d / np.abs(d))
