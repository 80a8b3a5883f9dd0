"""Truncated bosonic modes and their multi-mode embeddings.

Truncated ladder operators are kept as the exact matrix truncations of the
infinite ones; the ``[a, a^dagger] = 1`` defect in the top corner is never
patched.  Identity checks instead go through `safe_projector`, which keeps
only occupation states sitting ``safe_margin`` levels below the cutoff.

The composite basis is row-major over occupation tuples: slot 0 varies
slowest, matching ``numpy.kron(op_slot0, op_slot1)``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .linalg import DimensionMismatchError, identity, kron, spectral_norm

DEFAULT_N_TRUNC = 24
DEFAULT_SAFE_MARGIN = 6


@dataclass(frozen=True)
class ModeSpec:
    """Fock cutoff (states ``|0>..|n_trunc-1>``) and safe margin of one mode."""

    n_trunc: int = DEFAULT_N_TRUNC
    safe_margin: int = DEFAULT_SAFE_MARGIN

    def __post_init__(self):
        if self.n_trunc < 4:
            raise ValueError(f"n_trunc must be >= 4, got {self.n_trunc}")
        if not 0 <= self.safe_margin <= self.n_trunc / 2:
            raise ValueError(
                f"safe_margin must lie in [0, n_trunc/2], got {self.safe_margin} for n_trunc={self.n_trunc}"
            )

    @property
    def max_safe_occupation(self) -> int:
        return self.n_trunc - self.safe_margin - 1


@dataclass(frozen=True)
class CompositeSpace:
    modes: tuple[ModeSpec, ...]

    def __post_init__(self):
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("a composite space needs at least one mode")

    @classmethod
    def uniform(cls, n_modes: int, n_trunc: int = DEFAULT_N_TRUNC, safe_margin: int = DEFAULT_SAFE_MARGIN):
        return cls(tuple(ModeSpec(n_trunc, safe_margin) for _ in range(n_modes)))

    @property
    def dims(self) -> tuple[int, ...]:
        return tuple(m.n_trunc for m in self.modes)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @cached_property
    def safe_indices(self) -> np.ndarray:
        """Flat indices of basis states with every occupation in the safe range."""
        ranges = [range(m.max_safe_occupation + 1) for m in self.modes]
        occ = np.array(list(itertools.product(*ranges)), dtype=np.intp).T
        return np.ravel_multi_index(occ, self.dims)

    def occupations(self, index: int) -> tuple[int, ...]:
        return tuple(int(i) for i in np.unravel_index(index, self.dims))


def _cutoff(mode) -> int:
    if isinstance(mode, ModeSpec):
        return mode.n_trunc
    n = int(mode)
    if n < 1:
        raise ValueError(f"cutoff must be positive, got {n}")
    return n


def annihilation(mode) -> np.ndarray:
    """Lowering operator with ``<n-1|a|n> = sqrt(n)``.

    ``mode`` may be a `ModeSpec` or a bare cutoff.
    """
    n = _cutoff(mode)
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), 1).astype(np.complex128)


def creation(mode) -> np.ndarray:
    return annihilation(mode).conj().T


def number(mode) -> np.ndarray:
    n = _cutoff(mode)
    return np.diag(np.arange(n, dtype=float)).astype(np.complex128)


def basis_projector(mode, j: int, k: int | None = None) -> np.ndarray:
    """``|j><k|`` (``k`` defaults to ``j``)."""
    n = _cutoff(mode)
    out = np.zeros((n, n), dtype=np.complex128)
    out[j, j if k is None else k] = 1.0
    return out


def embed(op: np.ndarray, slot: int, space: CompositeSpace) -> np.ndarray:
    """Place ``op`` on ``slot`` with identities on all other modes."""
    if not 0 <= slot < len(space.modes):
        raise IndexError(f"slot {slot} out of range for {len(space.modes)}-mode space")
    if op.shape != (space.dims[slot],) * 2:
        raise DimensionMismatchError(
            f"operator of shape {op.shape} does not fit slot {slot} with cutoff {space.dims[slot]}"
        )
    factors = [op if i == slot else identity(d) for i, d in enumerate(space.dims)]
    return kron(*factors)


def safe_projector(space: CompositeSpace) -> np.ndarray:
    diag = np.zeros(space.dim)
    diag[space.safe_indices] = 1.0
    return np.diag(diag).astype(np.complex128)


def safe_block(A: np.ndarray, space: CompositeSpace) -> np.ndarray:
    """Compression ``P A P`` restricted to the safe subspace (a smaller matrix)."""
    idx = space.safe_indices
    return A[np.ix_(idx, idx)]


def assert_on_safe(A: np.ndarray, B: np.ndarray, space: CompositeSpace) -> float:
    """Relative residual ``||P(A-B)P|| / max(1, ||PAP||)`` on the safe subspace.

    The name follows the verification vocabulary; it returns the residual
    and leaves the comparison against a tolerance to the caller.
    """
    if A.shape != (space.dim, space.dim) or B.shape != A.shape:
        raise DimensionMismatchError(
            f"expected {space.dim}x{space.dim} operators, got {A.shape} and {B.shape}"
        )
    diff = safe_block(A - B, space)
    return spectral_norm(diff) / max(1.0, spectral_norm(safe_block(A, space)))


def mode_operators(space: CompositeSpace) -> list[np.ndarray]:
    """Annihilation operators embedded into every slot of ``space``."""
    return [embed(annihilation(m), i, space) for i, m in enumerate(space.modes)]

