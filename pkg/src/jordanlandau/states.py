"""Density matrices, expectation functionals, purity and partial traces.

Validation never repairs its input: a slightly negative eigenvalue or a
trace off by more than the tolerance is an error, not something to clip.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .claims import ALGEBRAIC, ClaimReport, judged
from .jordan import jordan_product
from .linalg import (
    adjoint,
    as_operator,
    check_same_dim,
    eigh,
    hermiticity_defect,
    kron,
    psd_sqrt,
    random_hermitian,
    spectral_norm,
)

POSITIVITY_FLOOR = -1e-12
TRACE_TOL = 1e-12
PURITY_TOL = 1e-10


class NotSelfAdjoint(ValueError):
    def __init__(self, defect: float):
        super().__init__(f"density candidate is not self-adjoint (defect {defect:.3e})")
        self.defect = defect


class NotPositive(ValueError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"density candidate is not positive (min eigenvalue {min_eigenvalue:.6g})")
        self.min_eigenvalue = min_eigenvalue


class TraceNotOne(ValueError):
    def __init__(self, defect: float):
        super().__init__(f"density candidate does not have unit trace (|tr - 1| = {defect:.3e})")
        self.defect = defect


@dataclass(frozen=True)
class DensityMatrix:
    op: np.ndarray
    min_eigenvalue: float
    trace_defect: float

    @property
    def dim(self) -> int:
        return self.op.shape[0]


def make_density(A) -> DensityMatrix:
    A = as_operator(A)
    defect = hermiticity_defect(A)
    if defect > 1e-12:
        raise NotSelfAdjoint(defect)
    lam_min = float(eigh(A).eigenvalues[0])
    if lam_min < POSITIVITY_FLOOR:
        raise NotPositive(lam_min)
    tr_defect = abs(np.trace(A).real - 1.0)
    if tr_defect > TRACE_TOL:
        raise TraceNotOne(tr_defect)
    return DensityMatrix(A, lam_min, tr_defect)


def density_from_vector(B, mode: str = "hs") -> DensityMatrix:
    """Density matrix represented by a Hilbert-Schmidt vector ``B``.

    ``mode="hs"`` gives ``B B^dagger / tr(B B^dagger)``; ``mode="jordan"``
    requires self-adjoint ``B`` and gives ``B^2 / tr(B^2)`` (exactly ``B^2``
    when ``tr(B^2) = 1``).
    """
    B = as_operator(B)
    if not np.any(B):
        raise ValueError("zero vector does not represent a state")
    if mode == "hs":
        rho = B @ adjoint(B)
    elif mode == "jordan":
        defect = hermiticity_defect(B)
        if defect > 1e-12:
            raise NotSelfAdjoint(defect)
        rho = B @ B
    else:
        raise ValueError(f"unknown mode {mode!r}")
    norm = np.trace(rho).real
    if abs(norm - 1.0) > TRACE_TOL:
        rho = rho / norm
    return make_density(rho)


def expectation(rho: DensityMatrix, A: np.ndarray, cross_check_tol: float = 1e-12) -> float:
    """``tr(rho . A)``, cross-checked against the associative ``tr(rho A)``."""
    check_same_dim(rho.op, A)
    jordan_value = np.trace(jordan_product(rho.op, A))
    assoc_value = np.trace(rho.op @ A)
    scale = max(1.0, spectral_norm(A))
    if abs(jordan_value - assoc_value) > cross_check_tol * scale:
        raise ArithmeticError(
            f"Jordan and associative traces disagree: {jordan_value} vs {assoc_value}"
        )
    if abs(jordan_value.imag) > 1e-13 * scale:
        raise ArithmeticError(f"expectation has imaginary part {jordan_value.imag:.3e}")
    return float(jordan_value.real)


def sqrt_psd(rho: DensityMatrix) -> np.ndarray:
    """Nonnegative self-adjoint square root."""
    return psd_sqrt(rho.op)


def is_pure(rho: DensityMatrix, tol: float = PURITY_TOL) -> tuple[bool, float]:
    """Return ``(pure, 1 - tr(rho^2))``; pure means ``||rho^2 - rho|| <= tol``."""
    r = rho.op
    r2 = r @ r
    pure = spectral_norm(r2 - r) <= tol
    return pure, float(1.0 - np.trace(r2).real)


def _reshape4(op: np.ndarray, dims: tuple[int, int]) -> np.ndarray:
    n1, n2 = dims
    if op.shape != (n1 * n2, n1 * n2):
        raise ValueError(f"operator of shape {op.shape} does not match a {n1}x{n2} composite space")
    return op.reshape(n1, n2, n1, n2)


def partial_trace(rho: DensityMatrix, dims: tuple[int, int], keep: str = "plus", probes: int = 20,
                  seed: int = 0, probe_tol: float = 1e-11) -> DensityMatrix:
    """Reduced state on slot 0 (``keep="plus"``) or slot 1 (``keep="minus"``).

    Computed by index contraction, then checked against the defining identity
    ``tr(rho_+ . A) = tr(rho . (A (x) 1))`` on random self-adjoint probes.
    """
    t = _reshape4(rho.op, dims)
    n1, n2 = dims
    if keep == "plus":
        reduced = np.einsum("ajbj->ab", t)
        lift = lambda A: kron(A, np.eye(n2))  # noqa: E731
        n_keep = n1
    elif keep == "minus":
        reduced = np.einsum("iaib->ab", t)
        lift = lambda A: kron(np.eye(n1), A)  # noqa: E731
        n_keep = n2
    else:
        raise ValueError(f"keep must be 'plus' or 'minus', got {keep!r}")
    rng = np.random.default_rng(seed)
    for _ in range(probes):
        A = random_hermitian(rng, n_keep)
        lhs = np.trace(jordan_product(reduced, A))
        rhs = np.trace(jordan_product(rho.op, lift(A)))
        if abs(lhs - rhs) > probe_tol * max(1.0, spectral_norm(A)):
            raise ArithmeticError(f"partial trace fails its probe identity ({abs(lhs - rhs):.3e})")
    return make_density(reduced)


@dataclass(frozen=True)
class ProductState:
    rho_plus: DensityMatrix
    rho_minus: DensityMatrix
    joint: DensityMatrix

    @classmethod
    def of(cls, rho_plus: DensityMatrix, rho_minus: DensityMatrix) -> "ProductState":
        return cls(rho_plus, rho_minus, make_density(kron(rho_plus.op, rho_minus.op)))

    @property
    def dims(self) -> tuple[int, int]:
        return self.rho_plus.dim, self.rho_minus.dim


@dataclass(frozen=True)
class PurityClassification:
    joint_pure: bool
    plus_pure: bool
    minus_pure: bool
    plus_defect: float
    minus_defect: float
    projector_plus: np.ndarray | None
    projector_minus: np.ndarray | None
    sign_ambiguity: str


def rank_one_projector(rho: DensityMatrix, tol: float = PURITY_TOL) -> np.ndarray | None:
    """The projector ``rho`` equals, if it is one of rank one; otherwise ``None``."""
    pure, _ = is_pure(rho, tol)
    if not pure:
        return None
    spec = eigh(rho.op)
    v = spec.eigenvectors[:, -1:]
    return v @ adjoint(v)


def classify_product_purity(state: ProductState) -> PurityClassification:
    joint_pure, _ = is_pure(state.joint)
    plus_pure, d_plus = is_pure(state.rho_plus)
    minus_pure, d_minus = is_pure(state.rho_minus)
    P_plus = rank_one_projector(state.rho_plus)
    P_minus = rank_one_projector(state.rho_minus)
    return PurityClassification(
        joint_pure, plus_pure, minus_pure, d_plus, d_minus, P_plus, P_minus,
        sign_ambiguity="square roots (+-P_plus) (x) (+-P_minus) all give the same joint state",
    )


PURITY_ANCHOR = "pure product states are tensor products of rank-one projectors, up to sign"


def product_purity_check(state: ProductState, tol: float = PURITY_TOL) -> ClaimReport:
    """Joint purity holds exactly when both factors are rank-one projectors.

    For a pure joint state the factor projectors are recovered and their
    tensor product compared with the joint state; all four sign choices of the
    square root are confirmed to square to it.
    """
    c = classify_product_purity(state)
    consistent = c.joint_pure == (c.plus_pure and c.minus_pure)
    residual = 0.0 if consistent else 1.0
    notes = f"joint pure={c.joint_pure}; factor purity defects +{c.plus_defect:.3e} -{c.minus_defect:.3e}"
    if c.joint_pure and c.projector_plus is not None and c.projector_minus is not None:
        joint = state.joint.op
        recon = kron(c.projector_plus, c.projector_minus)
        residual = max(residual, spectral_norm(recon - joint))
        for sp in (1, -1):
            for sm in (1, -1):
                B = kron(sp * c.projector_plus, sm * c.projector_minus)
                residual = max(residual, spectral_norm(B @ B - joint))
        notes += "; " + c.sign_ambiguity
    return judged("purity.product", PURITY_ANCHOR, ALGEBRAIC, residual, tol, notes)


def random_density(rng: np.random.Generator, dim: int, rank: int | None = None, support: int | None = None) -> DensityMatrix:
    """Random mixed state of the given rank, supported on the first ``support`` basis states."""
    support = dim if support is None else support
    rank = support if rank is None else rank
    G = np.zeros((dim, rank), dtype=np.complex128)
    G[:support] = rng.normal(size=(support, rank)) + 1j * rng.normal(size=(support, rank))
    rho = G @ adjoint(G)
    return make_density(rho / np.trace(rho).real)
