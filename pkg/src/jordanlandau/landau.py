"""Non-commutative Landau problem with harmonic confinement on two truncated modes.

Two operator realizations are provided:

* ``canonical-bopp``: two ordinary oscillator modes give commuting canonical
  pairs, and a Bopp shift produces ``[x, y] = i theta``.
* ``paper-chiral``: ``A_+ = a (x) 1``, ``A_- = 1 (x) a`` with ``x, y, p_x, p_y``
  assembled from the chiral inversion formulas.  In this realization
  ``[x, y] = 0`` whatever ``theta`` is.

Both share the length scale ``1/xi``.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import scipy.linalg
from scipy import sparse

from .claims import CANONICAL, CHIRAL, DISCREPANCY, ClaimReport, judged
from .fock import CompositeSpace, ModeSpec, annihilation, assert_on_safe, embed, number, safe_block
from .jordan import associator, associator_via_double_commutator
from .linalg import adjoint, commutator, identity


class DomainError(ValueError):
    """A derived constant is undefined for the given parameters."""


class SingularFitError(ValueError):
    pass


class NonConvergenceError(RuntimeError):
    def __init__(self, message: str, coarse: np.ndarray, fine: np.ndarray):
        super().__init__(message)
        self.coarse = coarse
        self.fine = fine


@dataclass(frozen=True)
class LandauParams:
    """Mass, trap and Larmor angular frequencies, non-commutativity, action quantum.

    ``omega_L`` already contains ``eB/mc``; the coupling ``eB/2c`` in the
    Hamiltonian is written as ``m * omega_L / 2``.
    """

    m: float = 1.0
    omega: float = 1.0
    omega_L: float = 2.0
    theta: float = 0.1
    hbar: float = 1.0

    def __post_init__(self):
        if self.m <= 0 or self.hbar <= 0:
            raise DomainError("m and hbar must be positive")
        if self.omega < 0 or self.omega_L < 0:
            raise DomainError("omega and omega_L must be nonnegative")
        if self.omega == 0 and self.omega_L == 0:
            raise DomainError("omega and omega_L cannot both vanish")

    def replace(self, **changes) -> "LandauParams":
        values = {**self.__dict__, **changes}
        return LandauParams(**values)


def landau_limit_theta(hbar: float, c: float, e: float, B: float) -> float:
    """``theta = -hbar c / (e B)``, the value tied to the field strength."""
    return -hbar * c / (e * B)


@dataclass(frozen=True)
class DerivedFrequencies:
    xi: float
    Omega: float
    omega_L_tilde: float
    Omega_plus: float
    Omega_minus: float
    hbar: float = 1.0
    m: float = 1.0


def derive_frequencies(p: LandauParams) -> DerivedFrequencies:
    m, w, wL, th, hbar = p.m, p.omega, p.omega_L, p.theta, p.hbar
    denom = 1 - m * wL * th / 2 + m**2 * w**2 * th**2 / 16 + m**2 * wL**2 * th**2 / 64
    if denom <= 0:
        raise DomainError(
            f"xi denominator 1 - m wL theta/2 + m^2 w^2 theta^2/16 + m^2 wL^2 theta^2/64 = {denom:.6g} is not positive"
        )
    xi = ((m**2 * w**2 / hbar**2 + m**2 * wL**2 / (4 * hbar**2)) / denom) ** 0.25
    w2 = w**2 + wL**2 / 4
    radicand = (
        w2
        - m * wL * w**2 * th / 2
        - m * wL**3 * th / 8
        + w2 * ((m * w * th / 4) ** 2 + (m * wL * th / 8) ** 2)
    )
    if radicand < 0:
        raise DomainError(f"Omega radicand = {radicand:.6g} is negative")
    Omega = math.sqrt(radicand)
    # wL * (1 - (wL/4 + w^2/wL) m theta), expanded so wL = 0 is allowed
    wLt = wL - (wL**2 / 4 + w**2) * m * th
    if wLt < 0:
        raise DomainError(f"effective Larmor frequency {wLt:.6g} is negative (Omega_plus < Omega_minus)")
    return DerivedFrequencies(
        xi=xi,
        Omega=Omega,
        omega_L_tilde=wLt,
        Omega_plus=Omega + wLt / 2,
        Omega_minus=Omega - wLt / 2,
        hbar=hbar,
        m=m,
    )


@dataclass
class OperatorSet:
    representation: str
    space: CompositeSpace
    x: np.ndarray
    y: np.ndarray
    p_x: np.ndarray
    p_y: np.ndarray
    z: np.ndarray
    z_bar: np.ndarray
    p_z: np.ndarray
    p_zbar: np.ndarray
    A_plus: np.ndarray
    A_minus: np.ndarray
    H_theta: np.ndarray | None = None

    @property
    def A_plus_dag(self) -> np.ndarray:
        return adjoint(self.A_plus)

    @property
    def A_minus_dag(self) -> np.ndarray:
        return adjoint(self.A_minus)

    def observables(self) -> dict[str, np.ndarray]:
        return {"x": self.x, "y": self.y, "p_x": self.p_x, "p_y": self.p_y}


def _require_two_modes(space: CompositeSpace):
    if len(space.modes) != 2:
        raise ValueError(f"expected a 2-mode space, got {len(space.modes)} modes")


def _complex_coordinates(x, y, px, py):
    s = 1 / math.sqrt(2)
    return s * (x + 1j * y), s * (x - 1j * y), s * (px - 1j * py), s * (px + 1j * py)


def build_canonical_operators(p: LandauParams, space: CompositeSpace, freqs: DerivedFrequencies | None = None) -> OperatorSet:
    """Bopp-shifted realization of ``[x,y] = i theta``, ``[x,p_x] = [y,p_y] = i hbar``."""
    _require_two_modes(space)
    freqs = freqs or derive_frequencies(p)
    hbar, xi = p.hbar, freqs.xi
    ell = 1 / xi
    a1, a2 = (embed(annihilation(m), i, space) for i, m in enumerate(space.modes))
    xt = ell / math.sqrt(2) * (a1 + adjoint(a1))
    pxt = 1j * hbar / (math.sqrt(2) * ell) * (adjoint(a1) - a1)
    yt = ell / math.sqrt(2) * (a2 + adjoint(a2))
    pyt = 1j * hbar / (math.sqrt(2) * ell) * (adjoint(a2) - a2)
    shift = p.theta / (2 * hbar)
    x = xt - shift * pyt
    y = yt + shift * pxt
    z, zb, pz, pzb = _complex_coordinates(x, y, pxt, pyt)
    A_plus = xi * zb / 2 + 1j / (xi * hbar) * pz
    A_minus = xi * z / 2 + 1j / (xi * hbar) * pzb
    ops = OperatorSet(CANONICAL, space, x, y, pxt, pyt, z, zb, pz, pzb, A_plus, A_minus)
    ops.H_theta = build_hamiltonian_quadratic(p, ops)
    return ops


def build_paper_chiral_operators(p: LandauParams, freqs: DerivedFrequencies, space: CompositeSpace) -> OperatorSet:
    """Chiral realization; ``H_theta`` is the diagonal chiral Hamiltonian.

    ``z, z_bar, p_z, p_zbar`` come from inverting the definitions of
    ``A_+`` and ``A_-``; ``x, y, p_x, p_y`` are recovered from them.
    """
    _require_two_modes(space)
    if not (freqs.xi > 0 and math.isfinite(freqs.xi)):
        raise DomainError(f"invalid xi = {freqs.xi}")
    xi, hbar = freqs.xi, p.hbar
    Ap = embed(annihilation(space.modes[0]), 0, space)
    Am = embed(annihilation(space.modes[1]), 1, space)
    Apd, Amd = adjoint(Ap), adjoint(Am)
    z_bar = (Ap + Amd) / xi
    z = (Am + Apd) / xi
    p_z = -0.5j * xi * hbar * (Ap - Amd)
    p_zbar = -0.5j * xi * hbar * (Am - Apd)
    s = 1 / math.sqrt(2)
    x = s * (z + z_bar)
    y = -1j * s * (z - z_bar)
    px = s * (p_z + p_zbar)
    py = 1j * s * (p_z - p_zbar)
    ops = OperatorSet(CHIRAL, space, x, y, px, py, z, z_bar, p_z, p_zbar, Ap, Am)
    ops.H_theta = build_hamiltonian_chiral(freqs, space)
    return ops


def build_hamiltonian_quadratic(p: LandauParams, ops: OperatorSet) -> np.ndarray:
    # the ladder operators are banded, so sparse products are far cheaper than dense ones
    k = p.m * p.omega_L / 2
    x, y, px, py = (sparse.csr_array(op) for op in (ops.x, ops.y, ops.p_x, ops.p_y))
    kin_x = px + k * y
    kin_y = py - k * x
    H = (kin_x @ kin_x + kin_y @ kin_y) / (2 * p.m) + p.m * p.omega**2 / 2 * (x @ x + y @ y)
    return H.toarray()


def build_hamiltonian_chiral(freqs: DerivedFrequencies, space: CompositeSpace) -> np.ndarray:
    _require_two_modes(space)
    Np = embed(number(space.modes[0]), 0, space)
    Nm = embed(number(space.modes[1]), 1, space)
    I = identity(space.dim)
    h = freqs.hbar
    return h * freqs.Omega_plus * (Np + 0.5 * I) + h * freqs.Omega_minus * (Nm + 0.5 * I)


def chiral_level(freqs: DerivedFrequencies, n_plus: int, n_minus: int) -> float:
    h = freqs.hbar
    return h * freqs.Omega_plus * (n_plus + 0.5) + h * freqs.Omega_minus * (n_minus + 0.5)


def spectrum_closed_form(freqs: DerivedFrequencies, K: int) -> np.ndarray:
    """Lowest ``K`` values of ``hbar Om+ (n+ + 1/2) + hbar Om- (n- + 1/2)`` with multiplicity."""
    if K < 1:
        raise ValueError("K must be >= 1")
    # no pair with n+ >= K or n- >= K can be among the K lowest
    levels = (chiral_level(freqs, a, b) for a in range(K) for b in range(K))
    return np.array(heapq.nsmallest(K, levels))


@dataclass
class SpectrumReport:
    energies: np.ndarray
    energies_doubled: np.ndarray
    n_trunc: int
    drift: float
    tolerance: float

    @property
    def converged(self) -> bool:
        return self.drift <= self.tolerance


def _doubled(space: CompositeSpace) -> CompositeSpace:
    return CompositeSpace(tuple(ModeSpec(2 * m.n_trunc, m.safe_margin) for m in space.modes))


def lowest_safe_eigenvalues(H: np.ndarray, space: CompositeSpace, K: int) -> np.ndarray:
    """Lowest ``K`` eigenvalues of ``H`` compressed to the safe subspace.

    The compression holds only exact matrix elements of the untruncated
    operator, so its eigenvalues are Ritz values: no spurious low states
    leak in from the truncation corner.
    """
    block = safe_block(H, space)
    if K > block.shape[0]:
        raise ValueError(f"K={K} exceeds the safe subspace dimension {block.shape[0]}")
    return scipy.linalg.eigh(block, eigvals_only=True, subset_by_index=[0, K - 1])


def spectrum_numerical(
    hamiltonian: Callable[[CompositeSpace], np.ndarray],
    K: int,
    space: CompositeSpace,
    tol: float = 1e-8,
    raise_on_drift: bool = True,
) -> SpectrumReport:
    """Lowest ``K`` safe-subspace eigenvalues at ``n_trunc`` and ``2 n_trunc``.

    ``hamiltonian`` builds the operator for a given space so it can be
    rebuilt at the doubled cutoff.
    """
    coarse = lowest_safe_eigenvalues(hamiltonian(space), space, K)
    big = _doubled(space)
    fine = lowest_safe_eigenvalues(hamiltonian(big), big, K)
    drift = float(np.max(np.abs(coarse - fine) / np.maximum(np.abs(fine), 1e-300)))
    report = SpectrumReport(coarse, fine, space.modes[0].n_trunc, drift, tol)
    if raise_on_drift and not report.converged:
        raise NonConvergenceError(
            f"lowest {K} levels drift by {drift:.3e} under cutoff doubling (tolerance {tol:.1e})",
            coarse,
            fine,
        )
    return report


def exact_level_degeneracy(H: np.ndarray, space: CompositeSpace, energy: float, tol: float = 1e-8) -> int:
    """Dimension of the ``energy`` eigenspace of ``H`` lying inside the safe subspace.

    Ritz vectors of the safe compression near ``energy`` are kept only when
    they are eigenvectors of the full truncated operator too, which filters
    out accidental Ritz coincidences from partially captured blocks.
    """
    idx = space.safe_indices
    w, V = np.linalg.eigh(safe_block(H, space))
    sel = np.abs(w - energy) <= tol * max(1.0, abs(energy))
    if not np.any(sel):
        return 0
    F = np.zeros((space.dim, int(sel.sum())), dtype=np.complex128)
    F[idx] = V[:, sel]
    sv = np.linalg.svd(H @ F - energy * F, compute_uv=False)
    return int(np.sum(sv <= tol * max(1.0, abs(energy))))


# --- associator relations -----------------------------------------------------

# (target, first generator, second generator) for each relation
ASSOCIATOR_ANSATZ = {
    "y": ("y", "x", "p_y"),
    "p_x": ("p_x", "x", "p_y"),
    "p_y": ("p_y", "y", "p_x"),
}


def printed_associator_coefficients(freqs: DerivedFrequencies) -> dict[str, tuple[float, float]]:
    """Printed coefficients of the right-hand operators, as ``(c1, c2)`` per relation."""
    Op, Om, xi, h = freqs.Omega_plus, freqs.Omega_minus, freqs.xi, freqs.hbar
    if Op == 0 or Om == 0:
        raise DomainError("Omega_plus and Omega_minus must be nonzero")
    return {
        "y": (1 / (2 * h * Om) - 1 / (2 * h * Op), -(1 / (xi**2 * h**2 * Op) + 1 / (xi**2 * h**2 * Om))),
        "p_x": (xi**2 / (4 * Op) + xi**2 / (4 * Om), 1 / (2 * h * Op) - 1 / (2 * h**2 * Om)),
        "p_y": (xi**2 * h / (4 * Op) + xi**2 * h / (4 * Om), 1 / (2 * Om) - 1 / (2 * Op)),
    }


@dataclass
class AssociatorOperators:
    y_L: np.ndarray
    y_R: np.ndarray
    pxL: np.ndarray
    pxR: np.ndarray
    pyL: np.ndarray
    pyR: np.ndarray
    source: str
    representation: str
    coefficients: dict[str, tuple[float, float]]
    paper_coefficients: dict[str, tuple[float, float]]
    fit_residuals: dict[str, float] = field(default_factory=dict)

    def coefficient_deltas(self) -> dict[str, tuple[float, float]]:
        return {
            k: (abs(self.coefficients[k][0] - self.paper_coefficients[k][0]),
                abs(self.coefficients[k][1] - self.paper_coefficients[k][1]))
            for k in self.coefficients
        }


def _right_operators(ops: OperatorSet, coeffs: dict[str, tuple[float, float]]):
    obs = ops.observables()
    out = {}
    for key, (_, g1, g2) in ASSOCIATOR_ANSATZ.items():
        c1, c2 = coeffs[key]
        out[key] = c1 * obs[g1] + c2 * obs[g2]
    return out


def _assemble(ops, coeffs, paper, source, residuals=None) -> AssociatorOperators:
    right = _right_operators(ops, coeffs)
    H4 = 4 * ops.H_theta
    return AssociatorOperators(
        y_L=H4, y_R=right["y"], pxL=H4, pxR=right["p_x"], pyL=H4, pyR=right["p_y"],
        source=source, representation=ops.representation,
        coefficients=coeffs, paper_coefficients=paper, fit_residuals=residuals or {},
    )


def printed_associator_operators(p: LandauParams, freqs: DerivedFrequencies, ops: OperatorSet) -> AssociatorOperators:
    """Left operators ``4 H_theta`` and right operators with the printed coefficients."""
    paper = printed_associator_coefficients(freqs)
    return _assemble(ops, paper, paper, "paper-literal")


def calibrate_associator_operators(p: LandauParams, freqs: DerivedFrequencies, ops: OperatorSet, fit_tol: float = 1e-8) -> AssociatorOperators:
    """Fit ``(c1, c2)`` so that ``i[H_theta, c1 G1 + c2 G2] = target`` on the safe subspace.

    Raises `SingularFitError` when the two commutator columns are
    (numerically) dependent, e.g. when a generator commutes with ``H_theta``.
    """
    space = ops.space
    H = ops.H_theta
    obs = ops.observables()
    coeffs, residuals = {}, {}
    for key, (target, g1, g2) in ASSOCIATOR_ANSATZ.items():
        cols = [safe_block(1j * commutator(H, obs[g]), space).ravel() for g in (g1, g2)]
        M = np.stack(cols, axis=1)
        sv = np.linalg.svd(M, compute_uv=False)
        if sv[0] == 0 or sv[-1] / sv[0] < 1e-10:
            raise SingularFitError(
                f"generators ({g1}, {g2}) give a singular fit for target {target} "
                f"(singular values {sv[0]:.3e}, {sv[-1]:.3e})"
            )
        rhs = safe_block(obs[target], space).ravel()
        c, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        # coefficients are real for self-adjoint generators; drop round-off
        c = np.real(c)
        fit = M @ c - rhs
        residuals[key] = float(np.linalg.norm(fit) / max(np.linalg.norm(rhs), 1e-300))
        if residuals[key] > fit_tol:
            raise SingularFitError(
                f"no exact ({g1}, {g2}) combination generates {target}: relative fit residual {residuals[key]:.3e}"
            )
        coeffs[key] = (float(c[0]), float(c[1]))
    paper = printed_associator_coefficients(freqs)
    return _assemble(ops, coeffs, paper, "calibrated", residuals)


def generator_relation_residuals(assoc: AssociatorOperators, ops: OperatorSet) -> dict[str, float]:
    """Safe-subspace residual of ``i[H_theta, G_R] = target`` for each relation."""
    H = ops.H_theta
    right = {"y": assoc.y_R, "p_x": assoc.pxR, "p_y": assoc.pyR}
    obs = ops.observables()
    return {
        key: assert_on_safe(1j * commutator(H, right[key]), obs[target], ops.space)
        for key, (target, _, _) in ASSOCIATOR_ANSATZ.items()
    }


ASSOCIATOR_ANCHOR = "theta and hbar as associators with 4 H_theta on the left"


def verify_associator_relations(
    assoc: AssociatorOperators,
    ops: OperatorSet,
    theta: float,
    hbar: float,
    tol: float = 1e-8,
) -> list[ClaimReport]:
    """Evaluate the three associator relations directly and as double commutators.

    The residual reported is the larger of the two routes; the notes carry
    both plus their mutual agreement.  In the chiral realization the ``y``
    relation cannot reproduce ``theta != 0`` (``[x,y] = 0`` there) and lands as
    a documented discrepancy.
    """
    space = ops.space
    I = identity(space.dim)
    cases = [
        ("associator.y", assoc.y_L, ops.x, assoc.y_R, theta),
        ("associator.px", assoc.pxL, ops.x, assoc.pxR, hbar),
        ("associator.py", assoc.pyL, ops.y, assoc.pyR, hbar),
    ]
    reports = []
    for claim_id, L, mid, R, value in cases:
        direct = associator(L, mid, R)
        dc = associator_via_double_commutator(L, mid, R)
        r_direct = assert_on_safe(direct, value * I, space)
        r_dc = assert_on_safe(dc, value * I, space)
        agree = assert_on_safe(direct, dc, space)
        notes = f"{assoc.source} coefficients; direct {r_direct:.3e}, double-commutator {r_dc:.3e}, routes agree to {agree:.3e}"
        on_fail = "fail"
        if ops.representation == CHIRAL and claim_id == "associator.y" and theta != 0:
            on_fail = DISCREPANCY
            notes += "; [x,y] vanishes in the chiral realization"
        if assoc.source == "paper-literal" and ops.representation == CANONICAL:
            on_fail = DISCREPANCY
            notes += "; printed coefficients do not solve the generator relation for the quadratic H_theta"
        reports.append(judged(claim_id, ASSOCIATOR_ANCHOR, ops.representation, max(r_direct, r_dc), tol, notes, on_fail))
    return reports


def commutator_table(ops: OperatorSet, p: LandauParams) -> dict[str, float]:
    """Safe-subspace residuals of all ten pairwise commutators against the NC Heisenberg algebra."""
    obs = ops.observables()
    names = list(obs)
    I = identity(ops.space.dim)
    expected = {("x", "y"): 1j * p.theta, ("x", "p_x"): 1j * p.hbar, ("y", "p_y"): 1j * p.hbar}
    out = {}
    for i, a in enumerate(names):
        for b in names[i:]:
            want = expected.get((a, b), 0.0) * I
            out[f"[{a},{b}]"] = assert_on_safe(commutator(obs[a], obs[b]), want, ops.space)
    return out

