"""Jordan-Schroedinger evolution of the two chiral oscillators.

Each chirality lives on its own truncated mode.  Its Hamiltonian
``hbar Omega (N + 1/2)`` is split as ``i[R1, S1] + i[R2, S2]`` and states
evolve by ``dv/dt = -(4/hbar) sum_k [L_{S_k}, L_{R_k}] v``.  Two routes are
provided: fixed-step RK4 on that equation, and conjugation by
``exp(-i H t / hbar)`` with ``H = i sum_k [R_k, S_k]``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .claims import ALGEBRAIC, ClaimReport, judged
from .fock import CompositeSpace, ModeSpec, annihilation, assert_on_safe, number, safe_block
from .jordan import (
    MATERIALIZE_MAX_DIM,
    jordan_product,
    left_commutator_apply,
    left_commutator_superop,
)
from .landau import DerivedFrequencies
from .linalg import (
    adjoint,
    commutator,
    expm_hermitian,
    hermiticity_defect,
    identity,
    kron,
    spectral_norm,
)
from .states import DensityMatrix, make_density

DECOMPOSITION_TOL = 1e-10
DEFAULT_STEP = 1e-3


class DegenerateChiralityError(ValueError):
    """The requested chirality has a non-positive frequency."""


class UncalibratedGeneratorError(ValueError):
    def __init__(self, residual: float, tol: float):
        super().__init__(
            f"generator decomposition residual {residual:.3e} exceeds {tol:.1e}; "
            "the Jordan evolution would not correspond to the Hamiltonian"
        )
        self.residual = residual


@dataclass(frozen=True)
class Quadratures:
    """``X = C1 (A^dagger + A)``, ``P = i C2 (A^dagger - A)`` on one mode."""

    label: str
    mode: ModeSpec
    Omega: float
    A: np.ndarray
    X: np.ndarray
    P: np.ndarray
    C1: float
    C2: float

    @property
    def space(self) -> CompositeSpace:
        return CompositeSpace((self.mode,))


@dataclass(frozen=True)
class ChiralQuadratures:
    plus: Quadratures
    minus: Quadratures | None

    @property
    def X_plus(self):
        return self.plus.X

    @property
    def P_plus(self):
        return self.plus.P

    @property
    def X_minus(self):
        return None if self.minus is None else self.minus.X

    @property
    def P_minus(self):
        return None if self.minus is None else self.minus.P


def quadratures(label: str, Omega: float, hbar: float, m: float, mode: ModeSpec) -> Quadratures:
    if not Omega > 0:
        raise DegenerateChiralityError(
            f"Omega_{label} = {Omega:.6g}: the length constant sqrt(hbar / 2 m Omega) diverges"
        )
    C1 = math.sqrt(hbar / (2 * m * Omega))
    C2 = math.sqrt(hbar * m * Omega / 2)
    A = annihilation(mode)
    Ad = adjoint(A)
    return Quadratures(label, mode, Omega, A, C1 * (Ad + A), 1j * C2 * (Ad - A), C1, C2)


def chiral_quadratures(freqs: DerivedFrequencies, space: CompositeSpace, allow_degenerate: bool = False) -> ChiralQuadratures:
    """Quadratures of both chiralities, each on its own mode of ``space``.

    With ``allow_degenerate`` a non-positive ``Omega_minus`` leaves the minus
    chirality out instead of raising.
    """
    plus = quadratures("plus", freqs.Omega_plus, freqs.hbar, freqs.m, space.modes[0])
    try:
        minus = quadratures("minus", freqs.Omega_minus, freqs.hbar, freqs.m, space.modes[-1])
    except DegenerateChiralityError:
        if not allow_degenerate:
            raise
        minus = None
    return ChiralQuadratures(plus, minus)


@dataclass(frozen=True)
class ChiralityGenerator:
    label: str
    quads: Quadratures
    R1: np.ndarray
    S1: np.ndarray
    R2: np.ndarray
    S2: np.ndarray
    H: np.ndarray
    hbar: float
    s2_factor: float
    paper_s2_factor: float
    decomposition_residual: float
    calibrated: bool

    @property
    def pairs(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """``(S_k, R_k)`` pairs in the order used by the left-commutator form."""
        return [(self.S1, self.R1), (self.S2, self.R2)]

    @property
    def H_decomposed(self) -> np.ndarray:
        """``i [R1, S1] + i [R2, S2]`` as a full truncated matrix."""
        return 1j * commutator(self.R1, self.S1) + 1j * commutator(self.R2, self.S2)


@dataclass(frozen=True)
class EvolutionGenerator:
    plus: ChiralityGenerator
    minus: ChiralityGenerator | None

    @property
    def calibrated(self) -> bool:
        return self.plus.calibrated and (self.minus is None or self.minus.calibrated)


def _decomposition_residual(H, R1, S1, R2, S2, space) -> float:
    total = 1j * commutator(R1, S1) + 1j * commutator(R2, S2)
    return assert_on_safe(H, total, space)


def _chirality_generator(q: Quadratures, hbar: float, s2_factor: float | None) -> ChiralityGenerator:
    A, Ad, X, P = q.A, adjoint(q.A), q.X, q.P
    N = number(q.mode)
    Om = q.Omega
    R1 = -(Om / 4) * (X @ A + Ad @ X)
    R2 = -(Om / 4) * (2 * q.C1 * P @ A + 2 * q.C1 * Ad @ P)
    S1 = P @ A + Ad @ P
    paper_factor = 2 * q.C1
    H = hbar * Om * (N + 0.5 * identity(q.mode.n_trunc))
    calibrated = s2_factor is not None
    if s2_factor is None:
        s2_factor = paper_factor
    S2 = s2_factor * N
    for name, op in (("R1", R1), ("R2", R2), ("S1", S1), ("S2", S2)):
        if hermiticity_defect(op) > 1e-12:
            raise ArithmeticError(f"{name} is not self-adjoint")
    res = _decomposition_residual(H, R1, S1, R2, S2, q.space)
    return ChiralityGenerator(q.label, q, R1, S1, R2, S2, H, hbar, s2_factor, paper_factor, res, calibrated)


def printed_generators(freqs: DerivedFrequencies, quads: ChiralQuadratures) -> EvolutionGenerator:
    """Generators with the printed ``S2 = 2 C1 A^dagger A``; residual stored, not asserted."""
    plus = _chirality_generator(quads.plus, freqs.hbar, None)
    minus = None if quads.minus is None else _chirality_generator(quads.minus, freqs.hbar, None)
    return EvolutionGenerator(plus, minus)


def fit_s2_factor(q: Quadratures, hbar: float) -> float:
    """Scalar ``s`` with ``H = i[R1, S1] + s i[R2, N]`` in least squares on the safe subspace."""
    seed = _chirality_generator(q, hbar, 1.0)
    N = number(q.mode)
    a = safe_block(seed.H - 1j * commutator(seed.R1, seed.S1), q.space).ravel()
    b = safe_block(1j * commutator(seed.R2, N), q.space).ravel()
    return float(np.real(np.vdot(b, a) / np.vdot(b, b)))


def calibrated_generators(freqs: DerivedFrequencies, quads: ChiralQuadratures) -> EvolutionGenerator:
    """Generators with ``S2`` rescaled so the decomposition closes at any parameters."""

    def build(q):
        if q is None:
            return None
        return _chirality_generator(q, freqs.hbar, fit_s2_factor(q, freqs.hbar))

    return EvolutionGenerator(build(quads.plus), build(quads.minus))


def statement_pairing_residual(gen: ChiralityGenerator) -> float:
    """Residual of ``H = i[R1, S2] + i[R2, S2]`` (the alternative pairing)."""
    total = 1j * commutator(gen.R1, gen.S2) + 1j * commutator(gen.R2, gen.S2)
    return assert_on_safe(gen.H, total, gen.quads.space)


# --- evolution ------------------------------------------------------------------


def evolve_von_neumann(rho0: DensityMatrix, H: np.ndarray, t: float, hbar: float = 1.0) -> DensityMatrix:
    """``rho(t) = exp(-iHt/hbar) rho0 exp(iHt/hbar)``."""
    U = expm_hermitian(H, -1j * t / hbar)
    return make_density(U @ rho0.op @ adjoint(U))


class JordanFlow:
    """Right-hand side ``-(4/hbar) sum_k [L_{S_k}, L_{R_k}] v`` of the Jordan equation."""

    def __init__(self, gen: ChiralityGenerator, materialize: bool | None = None):
        self.gen = gen
        self.dim = gen.H.shape[0]
        self.coeff = -4.0 / gen.hbar
        if materialize is None:
            materialize = self.dim <= MATERIALIZE_MAX_DIM
        self.superop = self.coeff * left_commutator_superop(gen.pairs) if materialize else None

    def __call__(self, v: np.ndarray) -> np.ndarray:
        if self.superop is not None:
            return (self.superop @ v.reshape(-1)).reshape(v.shape)
        return self.coeff * sum(left_commutator_apply(S, R, v) for S, R in self.gen.pairs)


def _rk4(f, v: np.ndarray, t: float, h: float) -> np.ndarray:
    if t == 0:
        return v.copy()
    n = max(1, int(round(abs(t) / h)))
    dt = t / n
    if f.superop is not None:
        # stay vectorized through the loop
        M = f.superop
        y = v.reshape(-1).astype(np.complex128)
        for _ in range(n):
            k1 = M @ y
            k2 = M @ (y + 0.5 * dt * k1)
            k3 = M @ (y + 0.5 * dt * k2)
            k4 = M @ (y + dt * k3)
            y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
        return y.reshape(v.shape)
    y = v.astype(np.complex128)
    for _ in range(n):
        k1 = f(y)
        k2 = f(y + 0.5 * dt * k1)
        k3 = f(y + 0.5 * dt * k2)
        k4 = f(y + dt * k3)
        y = y + (dt / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def _require_calibrated(gen: ChiralityGenerator, tol: float):
    if gen.decomposition_residual > tol:
        raise UncalibratedGeneratorError(gen.decomposition_residual, tol)


def evolve_jordan_state(
    v0: np.ndarray,
    gen: ChiralityGenerator,
    t: float,
    method: str = "rk4",
    h: float = DEFAULT_STEP,
    enforce_calibration: bool = True,
    tol: float = DECOMPOSITION_TOL,
) -> np.ndarray:
    """Evolve a self-adjoint state vector ``v0`` to time ``t``.

    ``method="rk4"`` integrates the Jordan equation with step ``h``;
    ``method="closed-form"`` conjugates with the unitary generated by the
    decomposed Hamiltonian ``i sum_k [R_k, S_k]``.
    """
    if enforce_calibration:
        _require_calibrated(gen, tol)
    if method == "rk4":
        return _rk4(JordanFlow(gen), v0, t, h)
    if method == "closed-form":
        U = expm_hermitian(gen.H_decomposed, -1j * t / gen.hbar)
        return U @ v0 @ adjoint(U)
    raise ValueError(f"unknown method {method!r}")


@dataclass
class Trajectory:
    times: np.ndarray
    states: list[np.ndarray]
    method: str
    trace_defects: list[float] = field(default_factory=list)
    hermiticity_defects: list[float] = field(default_factory=list)


def jordan_trajectory(
    v0: np.ndarray,
    gen: ChiralityGenerator,
    times: Sequence[float],
    method: str = "rk4",
    h: float = DEFAULT_STEP,
    enforce_calibration: bool = True,
) -> Trajectory:
    """States at every time in ``times`` (ascending, starting at or after 0)."""
    times = np.asarray(times, dtype=float)
    if np.any(np.diff(times) < 0) or (times.size and times[0] < 0):
        raise ValueError("times must be ascending and nonnegative")
    if enforce_calibration:
        _require_calibrated(gen, DECOMPOSITION_TOL)
    states = []
    if method == "rk4":
        flow = JordanFlow(gen)
        v, t_prev = v0.astype(np.complex128), 0.0
        for t in times:
            v = _rk4(flow, v, t - t_prev, h)
            t_prev = t
            states.append(v)
    else:
        states = [evolve_jordan_state(v0, gen, t, method, enforce_calibration=False) for t in times]
    tr0 = np.trace(v0).real
    traj = Trajectory(times, states, method)
    for v in states:
        traj.trace_defects.append(float(abs(np.trace(v) - tr0)))
        traj.hermiticity_defects.append(float(spectral_norm(v - adjoint(v))))
    return traj


def evolve_product_state(
    v_plus: np.ndarray,
    v_minus: np.ndarray | None,
    gen: EvolutionGenerator,
    t: float,
    method: str = "rk4",
    h: float = DEFAULT_STEP,
) -> tuple[np.ndarray, np.ndarray | None]:
    """Evolve each chiral factor under its own generator."""
    vp = evolve_jordan_state(v_plus, gen.plus, t, method, h)
    if v_minus is None or gen.minus is None:
        return vp, None
    return vp, evolve_jordan_state(v_minus, gen.minus, t, method, h)


def joint_hamiltonian(gen: EvolutionGenerator) -> np.ndarray:
    """``H_+ (x) 1 + 1 (x) H_-`` (just ``H_+`` when the minus chirality is absent)."""
    Hp = gen.plus.H
    if gen.minus is None:
        return Hp
    Hm = gen.minus.H
    return kron(Hp, identity(Hm.shape[0])) + kron(identity(Hp.shape[0]), Hm)


def product_vs_joint_residual(v_plus, v_minus, gen: EvolutionGenerator, t: float, h: float = DEFAULT_STEP) -> float:
    """``||v+(t) (x) v-(t) - U (v+ (x) v-) U^dagger||`` with ``U`` from the joint Hamiltonian."""
    vp, vm = evolve_product_state(v_plus, v_minus, gen, t, "rk4", h)
    factorwise = vp if vm is None else kron(vp, vm)
    joint0 = v_plus if vm is None else kron(v_plus, v_minus)
    U = expm_hermitian(joint_hamiltonian(gen), -1j * t / gen.plus.hbar)
    return spectral_norm(factorwise - U @ joint0 @ adjoint(U))


# --- audit ------------------------------------------------------------------------


@dataclass
class AuditResult:
    times: np.ndarray
    equivalence_residuals: list[float]
    derivative_residual: float
    trace_drift: float
    hermiticity_defect: float
    energy_drift: float
    decomposition_residual: float
    equivalence_tol: float = 1e-8
    derivative_tol: float = 1e-5

    @property
    def max_equivalence(self) -> float:
        return max(self.equivalence_residuals, default=0.0)

    @property
    def passed(self) -> bool:
        return self.max_equivalence <= self.equivalence_tol and self.derivative_residual <= self.derivative_tol

    def report(self) -> ClaimReport:
        # one normalized residual covering both checks
        score = max(self.max_equivalence / self.equivalence_tol, self.derivative_residual / self.derivative_tol)
        notes = (
            f"max ||v^2 - rho|| {self.max_equivalence:.3e} (tol {self.equivalence_tol:.0e}); "
            f"d rho/dt vs 2 B.dB/dt {self.derivative_residual:.3e} (tol {self.derivative_tol:.0e}); "
            f"trace drift {self.trace_drift:.3e}; hermiticity {self.hermiticity_defect:.3e}; "
            f"energy drift {self.energy_drift:.3e}; decomposition residual {self.decomposition_residual:.3e}; "
            "residual is the larger tolerance-normalized ratio"
        )
        return judged("evolution.jordan-vs-von-neumann", EVOLUTION_ANCHOR, ALGEBRAIC, score, 1.0, notes)


EVOLUTION_ANCHOR = "Jordan-Schroedinger flow reproduces von Neumann evolution of rho = B^2"


def _product(vp, vm):
    return vp if vm is None else kron(vp, vm)


def jordan_vs_von_neumann_audit(
    B_plus: np.ndarray,
    B_minus: np.ndarray | None,
    gen: EvolutionGenerator,
    t_grid: Sequence[float],
    h: float = DEFAULT_STEP,
    fd_step: float = 1e-4,
) -> AuditResult:
    """Compare ``v(t)^2`` (factor-wise RK4) with ``rho(t)`` (von Neumann, joint Hamiltonian).

    ``B_plus (x) B_minus`` must square to a valid density.  Generators are
    not required to be calibrated: with uncalibrated ones the mismatch is
    measured and the decomposition residual is attached.
    """
    hbar = gen.plus.hbar
    B0 = _product(B_plus, B_minus)
    use_minus = B_minus is not None and gen.minus is not None
    if B_minus is not None and not use_minus:
        raise ValueError("a minus factor was given but the minus chirality is disabled")
    rho0 = make_density(B0 @ B0)
    H = joint_hamiltonian(gen) if use_minus else gen.plus.H
    t_grid = np.asarray(t_grid, dtype=float)
    tp = jordan_trajectory(B_plus, gen.plus, t_grid, "rk4", h, enforce_calibration=False)
    tm = jordan_trajectory(B_minus, gen.minus, t_grid, "rk4", h, enforce_calibration=False) if use_minus else None
    E0 = np.trace(rho0.op @ H).real
    eq, tr_drift, herm, e_drift = [], 0.0, 0.0, 0.0
    for i, t in enumerate(t_grid):
        v = _product(tp.states[i], tm.states[i] if tm else None)
        rho_t = evolve_von_neumann(rho0, H, t, hbar)
        v2 = v @ v
        eq.append(spectral_norm(v2 - rho_t.op))
        tr_drift = max(tr_drift, abs(np.trace(v2).real - 1.0))
        herm = max(herm, spectral_norm(v - adjoint(v)))
        e_drift = max(e_drift, abs(np.trace(v2 @ H).real - E0) / max(1.0, abs(E0)))
    # derivative chain at the middle of the grid
    t_mid = float(t_grid[len(t_grid) // 2]) if t_grid.size else 0.0
    rho_p = evolve_von_neumann(rho0, H, t_mid + fd_step, hbar).op
    rho_m = evolve_von_neumann(rho0, H, t_mid - fd_step, hbar).op
    rho_dot = (rho_p - rho_m) / (2 * fd_step)
    vp_mid = evolve_jordan_state(B_plus, gen.plus, t_mid, "rk4", h, enforce_calibration=False)
    dvp = JordanFlow(gen.plus)(vp_mid)
    if use_minus:
        vm_mid = evolve_jordan_state(B_minus, gen.minus, t_mid, "rk4", h, enforce_calibration=False)
        dvm = JordanFlow(gen.minus)(vm_mid)
        B_mid, B_dot = kron(vp_mid, vm_mid), kron(dvp, vm_mid) + kron(vp_mid, dvm)
    else:
        B_mid, B_dot = vp_mid, dvp
    fd_res = spectral_norm(rho_dot - 2 * jordan_product(B_mid, B_dot))
    decomp = max(gen.plus.decomposition_residual, gen.minus.decomposition_residual if use_minus else 0.0)
    return AuditResult(t_grid, eq, fd_res, tr_drift, herm, e_drift, decomp)


# --- order study --------------------------------------------------------------------


@dataclass
class ConvergenceStudy:
    steps: list[float]
    errors: list[float]

    @property
    def orders(self) -> list[float]:
        return [
            math.log(self.errors[i] / self.errors[i + 1]) / math.log(self.steps[i] / self.steps[i + 1])
            for i in range(len(self.steps) - 1)
        ]


def rk4_convergence(v0: np.ndarray, gen: ChiralityGenerator, t: float, steps: Sequence[float]) -> ConvergenceStudy:
    """RK4 error against the closed-form route for each step size."""
    ref = evolve_jordan_state(v0, gen, t, "closed-form", enforce_calibration=False)
    errs = [spectral_norm(evolve_jordan_state(v0, gen, t, "rk4", h, enforce_calibration=False) - ref) for h in steps]
    return ConvergenceStudy(list(steps), errs)


def equivalence_chain(gen: ChiralityGenerator, v: np.ndarray) -> dict[str, float]:
    """Pairwise residuals along the chain of equal forms of the Jordan right-hand side.

    ``-(4/hbar) sum [L_S, L_R] v``, ``-(4/hbar) sum [R, v, S]``,
    ``-(1/hbar) sum [v, [R, S]]`` and ``-(i/hbar) [H_dec, v]``.
    """
    from .jordan import associator, associator_via_double_commutator

    hbar = gen.hbar
    c = -4.0 / hbar
    left = c * sum(left_commutator_apply(S, R, v) for S, R in gen.pairs)
    assoc = c * sum(associator(R, v, S) for S, R in gen.pairs)
    dcomm = c * sum(associator_via_double_commutator(R, v, S) for S, R in gen.pairs)
    vn = -1j / hbar * commutator(gen.H_decomposed, v)
    scale = max(spectral_norm(vn), 1e-300)
    return {
        "left-mult vs associator": spectral_norm(left - assoc) / scale,
        "associator vs double commutator": spectral_norm(assoc - dcomm) / scale,
        "double commutator vs von Neumann": spectral_norm(dcomm - vn) / scale,
    }


def with_minus_disabled(gen: EvolutionGenerator) -> EvolutionGenerator:
    return replace(gen, minus=None)
