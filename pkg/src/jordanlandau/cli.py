"""Command-line entry point: ``verify``, ``spectrum``, ``evolve``, ``calibrate``.

Exit codes: 0 clean, 1 claim failure, 2 configuration error, 3 numerical
error, 4 degenerate-parameter request.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

import numpy as np

from . import catalog
from .claims import DISCREPANCY, FAIL, PASS, SKIPPED, ClaimReport
from .config import SCHEMA_VERSION, ConfigError, RunConfig, default_config_document, load_config
from .evolution import (
    DegenerateChiralityError,
    UncalibratedGeneratorError,
    calibrated_generators,
    chiral_quadratures,
    evolve_jordan_state,
    evolve_von_neumann,
    fit_s2_factor,
    jordan_trajectory,
    joint_hamiltonian,
    printed_generators,
)
from .fock import CompositeSpace
from .landau import (
    DomainError,
    NonConvergenceError,
    SingularFitError,
    build_canonical_operators,
    build_hamiltonian_quadratic,
    calibrate_associator_operators,
    derive_frequencies,
    spectrum_closed_form,
    spectrum_numerical,
)
from .linalg import EigenDecompositionError, kron, spectral_norm
from .states import make_density

EXIT_OK, EXIT_CLAIMS, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_DEGENERATE = 0, 1, 2, 3, 4
NUMERICAL_ERRORS = (NonConvergenceError, SingularFitError, EigenDecompositionError, ArithmeticError,
                    np.linalg.LinAlgError, UncalibratedGeneratorError)


def _finite(x):
    if isinstance(x, float) and not math.isfinite(x):
        return None
    return x


def _claim_record(r: ClaimReport) -> dict:
    return {k: _finite(v) for k, v in r.to_dict().items()}


def _write_json(doc: dict, out: str | None):
    text = json.dumps(doc, indent=2, sort_keys=False) + "\n"
    if out:
        Path(out).write_text(text)
    return text


def _table(rows: list[list[str]], header: list[str]) -> str:
    widths = [max(len(str(x)) for x in col) for col in zip(header, *rows)]
    fmt = "  ".join(f"{{:<{w}}}" for w in widths)
    lines = [fmt.format(*header), fmt.format(*("-" * w for w in widths))]
    lines += [fmt.format(*map(str, r)) for r in rows]
    return "\n".join(lines)


def _params_dict(p) -> dict:
    return {"m": p.m, "omega": p.omega, "omega_L": p.omega_L, "theta": p.theta, "hbar": p.hbar}


# --- verify -----------------------------------------------------------------------------


def cmd_verify(cfg: RunConfig, out: str | None) -> int:
    doc = {"schema": SCHEMA_VERSION, "command": "verify", "seed": cfg.seed, "config": cfg.to_dict(),
           "algebraic": [], "points": [], "error": None}
    for i, p in enumerate(cfg.points):
        doc["points"].append({"params": _params_dict(p), "claims": []})
    code = EXIT_OK
    try:
        for gi, group in enumerate(catalog.GROUPS):
            if not catalog.selected(group, cfg.checks):
                continue
            targets = range(len(cfg.points)) if group.per_point else [None]
            for pi in targets:
                reports = catalog.run_group(group, gi, cfg, pi)
                if cfg.checks:
                    reports = [r for r in reports if r.claim_id in cfg.checks]
                sink = doc["algebraic"] if pi is None else doc["points"][pi]["claims"]
                sink.extend(_claim_record(r) for r in reports)
    except DomainError as exc:
        doc["error"] = f"degenerate parameters: {exc}"
        code = EXIT_DEGENERATE
    except NUMERICAL_ERRORS as exc:
        doc["error"] = f"{type(exc).__name__}: {exc}"
        code = EXIT_NUMERICAL
    all_claims = doc["algebraic"] + [c for pt in doc["points"] for c in pt["claims"]]
    summary = {s: sum(c["status"] == s for c in all_claims) for s in (PASS, FAIL, DISCREPANCY, SKIPPED)}
    doc["summary"] = summary
    _write_json(doc, out)
    rows = []
    for label, claims in [("-", doc["algebraic"])] + [(str(i), pt["claims"]) for i, pt in enumerate(doc["points"])]:
        for c in claims:
            res = "n/a" if c["residual"] is None else f"{c['residual']:.3e}"
            rows.append([label, c["claim_id"], c["representation"], res, f"{c['tolerance']:.1e}", c["status"]])
    print(_table(rows, ["point", "claim", "representation", "residual", "tolerance", "status"]))
    print(f"summary: {summary}")
    if doc["error"]:
        print(f"error: {doc['error']}", file=sys.stderr)
        return code
    return EXIT_CLAIMS if summary[FAIL] else EXIT_OK


# --- spectrum -----------------------------------------------------------------------------


def cmd_spectrum(cfg: RunConfig, K: int, out: str | None) -> int:
    docs = []
    for p in cfg.points:
        f = derive_frequencies(p)
        space = CompositeSpace((cfg.truncation, cfg.truncation))

        def H(sp, p=p, f=f):
            return build_hamiltonian_quadratic(p, build_canonical_operators(p, sp, f))

        rep = spectrum_numerical(H, K, space, cfg.tolerances["convergence"])
        closed = spectrum_closed_form(f, K)
        deltas = rep.energies - closed
        informational = p.theta != 0
        rows = [[k, f"{e:.12f}", f"{c:.12f}", f"{d:.3e}"] for k, (e, c, d) in enumerate(zip(rep.energies, closed, deltas))]
        print(f"params {_params_dict(p)}; Omega_plus {f.Omega_plus:.12g}, Omega_minus {f.Omega_minus:.12g}")
        print(_table(rows, ["k", "numerical", "closed form", "delta"]))
        print(f"cutoff-doubling drift {rep.drift:.3e} (tolerance {rep.tolerance:.1e})"
              + ("; deltas informational at theta != 0" if informational else ""))
        docs.append({
            "params": _params_dict(p),
            "numerical": rep.energies.tolist(),
            "numerical_doubled_cutoff": rep.energies_doubled.tolist(),
            "closed_form": closed.tolist(),
            "deltas": deltas.tolist(),
            "deltas_informational": informational,
            "drift": rep.drift,
            "converged": rep.converged,
        })
    _write_json({"schema": SCHEMA_VERSION, "command": "spectrum", "K": K, "points": docs}, out)
    return EXIT_OK


# --- evolve -------------------------------------------------------------------------------


def _initial_factor(kind: str, n: int, rng: np.random.Generator) -> np.ndarray:
    if kind == "stationary":
        B = np.zeros((n, n), dtype=complex)
        B[0, 0] = 1.0
        return B
    if kind == "random-pure":
        psi = np.zeros(n, dtype=complex)
        psi[:4] = rng.normal(size=4) + 1j * rng.normal(size=4)
        psi /= np.linalg.norm(psi)
        return np.outer(psi, psi.conj())
    raise ConfigError(f"unknown initial state {kind!r}")


def cmd_evolve(cfg: RunConfig, t_max: float, steps: int, initial: str, h: float, out: str | None,
               csv_path: str | None) -> int:
    p = cfg.points[0]
    f = derive_frequencies(p)
    mode = cfg.evolution_truncation
    quads = chiral_quadratures(f, CompositeSpace((mode, mode)))
    gen = calibrated_generators(f, quads)
    rng = np.random.default_rng(cfg.seed)
    n = mode.n_trunc
    Bp, Bm = _initial_factor(initial, n, rng), _initial_factor(initial, n, rng)
    times = np.linspace(0.0, t_max, steps + 1)
    tp = jordan_trajectory(Bp, gen.plus, times, "rk4", h)
    tm = jordan_trajectory(Bm, gen.minus, times, "rk4", h)
    H = joint_hamiltonian(gen)
    rho0 = make_density(kron(Bp @ Bp, Bm @ Bm))
    E0 = np.trace(rho0.op @ H).real
    rows = []
    for i, t in enumerate(times):
        v = kron(tp.states[i], tm.states[i])
        v2 = v @ v
        rho_t = evolve_von_neumann(rho0, H, t, f.hbar)
        rows.append({
            "t": float(t),
            "trace_defect": float(abs(np.trace(v2).real - 1.0)),
            "hermiticity_defect": float(max(tp.hermiticity_defects[i], tm.hermiticity_defects[i])),
            "energy_defect": float(abs(np.trace(v2 @ H).real - E0) / max(1.0, abs(E0))),
            "jordan_vs_von_neumann": float(spectral_norm(v2 - rho_t.op)),
        })
    if csv_path:
        with open(csv_path, "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    worst = {k: max(r[k] for r in rows) for k in rows[0] if k != "t"}
    _write_json({"schema": SCHEMA_VERSION, "command": "evolve", "params": _params_dict(p), "initial": initial,
                 "step": h, "s2_factors": [gen.plus.s2_factor, gen.minus.s2_factor], "max_defects": worst,
                 "trajectory": rows}, out)
    print(_table([[k, f"{v:.3e}"] for k, v in worst.items()], ["column", "max over trajectory"]))
    return EXIT_OK


# --- calibrate -----------------------------------------------------------------------------


def cmd_calibrate(cfg: RunConfig, out: str | None) -> int:
    docs = []
    for p in cfg.points:
        f = derive_frequencies(p)
        space = CompositeSpace((cfg.truncation, cfg.truncation))
        fit = calibrate_associator_operators(p, f, build_canonical_operators(p, space, f))
        mode = cfg.evolution_truncation
        quads = chiral_quadratures(f, CompositeSpace((mode, mode)), allow_degenerate=True)
        lit = printed_generators(f, quads)
        rows, coeffs = [], {}
        for key, name in (("y", "y_R"), ("p_x", "pxR"), ("p_y", "pyR")):
            for j in range(2):
                printed, fitted = fit.paper_coefficients[key][j], fit.coefficients[key][j]
                rows.append([name, j + 1, f"{printed:.12g}", f"{fitted:.12g}", f"{abs(fitted - printed):.3e}"])
            coeffs[name] = {"printed": list(fit.paper_coefficients[key]), "fitted": list(fit.coefficients[key]),
                            "fit_residual": fit.fit_residuals[key]}
        s2 = []
        for q, g in ((quads.plus, lit.plus), (quads.minus, lit.minus)):
            if q is None:
                continue
            s = fit_s2_factor(q, f.hbar)
            rows.append([f"S2 factor ({q.label})", "-", f"{g.paper_s2_factor:.12g}", f"{s:.12g}",
                         f"{abs(s - g.paper_s2_factor):.3e}"])
            s2.append({"chirality": q.label, "printed": g.paper_s2_factor, "fitted": s,
                       "printed_decomposition_residual": g.decomposition_residual})
        print(f"params {_params_dict(p)} (canonical realization)")
        print(_table(rows, ["operator", "coefficient", "printed", "fitted", "delta"]))
        docs.append({"params": _params_dict(p), "coefficients": coeffs, "s2": s2})
    _write_json({"schema": SCHEMA_VERSION, "command": "calibrate", "points": docs}, out)
    return EXIT_OK


# --- entry point ------------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    # suppressed defaults so a subcommand does not reset options given before it
    common.add_argument("--config", default=argparse.SUPPRESS, help="JSON configuration file (defaults apply when omitted)")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS, help="override the configuration seed")
    common.add_argument("--out", default=argparse.SUPPRESS, help="write the JSON report here")
    parser = argparse.ArgumentParser(prog="jordan-landau", description=__doc__.splitlines()[0],
                                     parents=[common])
    parser.add_argument("--emit-default-config", action="store_true",
                        help="print the default configuration with its header and exit")
    sub = parser.add_subparsers(dest="command")
    sub.add_parser("verify", parents=[common], help="run the claim catalog")
    sp = sub.add_parser("spectrum", parents=[common], help="numerical vs closed-form energies")
    sp.add_argument("-K", type=int, default=10, help="number of levels")
    ev = sub.add_parser("evolve", parents=[common], help="Jordan-Schroedinger trajectory with invariant defects")
    ev.add_argument("--t-max", type=float, default=10.0)
    ev.add_argument("--steps", type=int, default=100, help="number of output intervals")
    ev.add_argument("--step", type=float, default=1e-3, help="RK4 step size")
    ev.add_argument("--initial", default="random-pure", choices=["random-pure", "stationary"])
    ev.add_argument("--csv", help="also write the trajectory table as CSV")
    sub.add_parser("calibrate", parents=[common], help="printed vs fitted coefficients")
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_CONFIG if exc.code else EXIT_OK
    if args.emit_default_config:
        print(json.dumps(default_config_document(), indent=2))
        return EXIT_OK
    if args.command is None:
        parser.print_help()
        return EXIT_CONFIG
    for name in ("config", "seed", "out"):
        if not hasattr(args, name):
            setattr(args, name, None)
    try:
        cfg = load_config(args.config, set(catalog.claim_ids()))
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    if args.seed is not None:
        cfg.seed = args.seed
    try:
        if args.command == "verify":
            return cmd_verify(cfg, args.out)
        if args.command == "spectrum":
            return cmd_spectrum(cfg, args.K, args.out)
        if args.command == "evolve":
            return cmd_evolve(cfg, args.t_max, args.steps, args.initial, args.step, args.out, args.csv)
        return cmd_calibrate(cfg, args.out)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (DomainError, DegenerateChiralityError) as exc:
        print(f"degenerate parameters: {exc}", file=sys.stderr)
        return EXIT_DEGENERATE
    except NUMERICAL_ERRORS as exc:
        print(f"numerical error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
