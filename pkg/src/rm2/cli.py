"""Command-line interface: machine-readable grids, tables and verification runs.

Every command emits a deterministic payload (no timestamps, stable key order,
17 significant digits in CSV); run metadata goes to a ``<out>.meta.json``
sidecar only when ``--out`` is used.  Exit code 0 means every check in the
run passed.
"""

from __future__ import annotations

import argparse
import datetime
import json
import sys

import numpy as np

from . import __version__
from .analytic import SolutionFamily, general_solution, pole_eigenfunction
from .config import apply_env_overrides
from .errors import RM2Error, PreconditionFailed
from .model import ModelParams, momenta_from_energy, potential
from .oracle import Divergent, bound_states, integrate_norm
from .scattering import (
    flux_defect,
    min_t22_on_rectangle,
    s_matrix,
    transfer_matrix,
    verify_pole,
)
from .spectrum import bound_state_count, enumerate_poles
from .susy import (
    ReciprocalState,
    SeedKind,
    SeedSpec,
    SusyChain,
    partner_potential_first_order,
    partner_potential_wronskian,
    verify_equivalence,
)

SCHEMA_VERSION = "1"


def _parse_grid(text: str) -> tuple[float, float, int]:
    try:
        lo, hi, n = text.split(":")
        return float(lo), float(hi), int(n)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(
            f"grid must look like min:max:points, got {text!r}"
        ) from exc


def _format_value(value) -> str:
    return f"{value:.17g}"


def _emit(record: dict, fmt: str, out: str | None, csv_table: tuple[list[str], list[list[float]]] | None) -> None:
    if fmt == "csv":
        if csv_table is None:
            raise PreconditionFailed("csv output is only available for grid commands")
        header, rows = csv_table
        lines = [",".join(header)]
        lines.extend(",".join(_format_value(v) for v in row) for row in rows)
        text = "\n".join(lines) + "\n"
    else:
        text = json.dumps(record, indent=2, sort_keys=True) + "\n"
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
        meta = {
            "generated_at": datetime.datetime.now(datetime.timezone.utc).isoformat(),
            "tool_version": __version__,
        }
        with open(out + ".meta.json", "w", encoding="utf-8") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
            fh.write("\n")
    else:
        sys.stdout.write(text)


def _record(command: str, params: ModelParams | None, payload: dict) -> dict:
    rec = {"schema_version": SCHEMA_VERSION, "command": command, "payload": payload}
    if params is not None:
        rec["params"] = {"lambda": params.lam, "beta": params.beta}
    return rec


def _cmd_potential(args) -> int:
    p = ModelParams(args.lam, args.beta)
    lo, hi, n = args.grid
    xs = np.linspace(lo, hi, n)
    vs = potential(p, xs)
    payload = {
        "provenance": "analytic",
        "x": [float(x) for x in xs],
        "v": [float(v) for v in vs],
    }
    _emit(
        _record("potential", p, payload),
        args.format,
        args.out,
        (["x", "v"], [[float(x), float(v)] for x, v in zip(xs, vs)]),
    )
    return 0


def _cmd_poles(args) -> int:
    p = ModelParams(args.lam, args.beta)
    enumeration = enumerate_poles(p, args.n_cap)
    records = [
        {
            "condition": r.condition,
            "n": r.n,
            "energy": r.energy,
            "mu": r.mu,
            "nu": r.nu,
            "class": r.pole_class.value,
            "boundary_case": r.boundary_case,
        }
        for r in enumeration.records
    ]
    payload = {
        "provenance": "analytic",
        "records": records,
        "singular": [
            {"condition": c, "n": n, "message": m} for c, n, m in enumeration.singular
        ],
        "notes": list(enumeration.notes),
        "bound_count": bound_state_count(p),
    }
    csv_rows = [
        [r.condition, r.n, r.energy, r.mu, r.nu] for r in enumeration.records
    ]
    _emit(
        _record("poles", p, payload),
        args.format,
        args.out,
        (["condition", "n", "energy", "mu", "nu"], csv_rows),
    )
    return 0


def _cmd_wavefunction(args) -> int:
    p = ModelParams(args.lam, args.beta)
    lo, hi, n = args.grid
    xs = np.linspace(lo, hi, n)
    if args.energy is not None:
        family = (
            SolutionFamily.PSI_GENERAL if args.family == "psi" else SolutionFamily.PHI_GENERAL
        )
        solution = general_solution(p, args.energy, family)
        rows = []
        for x in xs:
            value, deriv = solution.value_and_derivative(float(x))
            rows.append([float(x), value.real, value.imag, deriv.real, deriv.imag])
        header = ["x", "value_re", "value_im", "deriv_re", "deriv_im"]
        payload = {
            "provenance": "analytic",
            "family": f"{args.family}_general",
            "energy": args.energy,
            "columns": header,
            "rows": rows,
        }
    else:
        if args.condition is None or args.n is None:
            raise PreconditionFailed(
                "pole wavefunctions need --condition and --n (or pass --energy)"
            )
        wavefunction = pole_eigenfunction(p, args.condition, args.family, args.n)
        rows = []
        for x in xs:
            log_scale, v, dv = wavefunction.scaled(float(x))
            rows.append([float(x), log_scale, v, dv])
        header = ["x", "log_scale", "scaled_value", "scaled_derivative"]
        payload = {
            "provenance": "analytic",
            "family": f"{args.family}_{args.condition}",
            "n": args.n,
            "energy": wavefunction.energy,
            "columns": header,
            "rows": rows,
        }
    _emit(_record("wavefunction", p, payload), args.format, args.out, (header, rows))
    return 0


def _cmd_smatrix(args) -> int:
    p = ModelParams(args.lam, args.beta)
    energy = args.energy
    t = transfer_matrix(p, energy)
    s = s_matrix(p, energy)
    momenta = momenta_from_energy(p, energy)
    payload = {
        "provenance": "analytic",
        "energy": energy,
        "k": [momenta.k.real, momenta.k.imag],
        "k_prime": [momenta.k_prime.real, momenta.k_prime.imag],
        "transfer": {
            name: [value.real, value.imag]
            for name, value in (("t11", t.t11), ("t12", t.t12), ("t21", t.t21), ("t22", t.t22))
        },
        "s": {
            name: [value.real, value.imag]
            for name, value in (("s11", s.s11), ("s12", s.s12), ("s21", s.s21), ("s22", s.s22))
        },
        "det_t": [t.det.real, t.det.imag],
    }
    if energy > 2 * p.beta:
        payload["flux_defect"] = flux_defect(p, energy)
    _emit(_record("smatrix", p, payload), args.format, args.out, None)
    return 0


def _build_chain(p: ModelParams, args) -> SusyChain:
    kind = {
        "ground": SeedKind.GROUND_STATE,
        "bound": SeedKind.BOUND_EXCITED,
        "redundant": SeedKind.REDUNDANT,
        "antibound": SeedKind.ANTI_BOUND,
    }[args.seed_kind]
    if kind is SeedKind.GROUND_STATE:
        order = args.order or 1
        seeds = [SeedSpec(SeedKind.GROUND_STATE, 1, 0)]
        seeds.extend(SeedSpec(SeedKind.BOUND_EXCITED, 1, n) for n in range(1, order))
        return SusyChain(p, tuple(seeds))
    ns = args.n or []
    if not ns:
        raise PreconditionFailed(f"--seed-kind {args.seed_kind} needs at least one --n")
    condition = args.condition or (2 if kind is SeedKind.ANTI_BOUND else 1)
    return SusyChain(p, tuple(SeedSpec(kind, condition, n) for n in ns))


def _cmd_susy(args) -> int:
    p = ModelParams(args.lam, args.beta)
    chain = _build_chain(p, args)
    if chain.order == 1:
        partner = partner_potential_first_order(p, chain.seeds[0])
    else:
        partner = partner_potential_wronskian(chain)
    lo, hi, n = args.grid
    xs = np.linspace(lo, hi, n)
    rows = [[float(x), float(potential(p, float(x))), float(partner(float(x)))] for x in xs]
    base_spectrum = bound_states(lambda x: potential(p, x), p.beta)
    partner_spectrum = partner.oracle_spectrum()
    payload = {
        "seed_chain": [
            {"kind": s.kind.value, "condition": s.condition, "n": s.n} for s in chain.seeds
        ],
        "seed_energies": {"provenance": "analytic", "values": list(partner.seed_energies)},
        "grid": {"provenance": "analytic", "columns": ["x", "v_base", "v_partner"], "rows": rows},
        "base_spectrum": {"provenance": "oracle", "energies": list(base_spectrum.energies)},
        "partner_spectrum": {"provenance": "oracle", "energies": list(partner_spectrum.energies)},
        "bound_count_change": {
            "provenance": "comparison",
            "value": len(partner_spectrum.energies) - len(base_spectrum.energies),
        },
    }
    if chain.order == 1 and chain.seeds[0].kind is SeedKind.ANTI_BOUND:
        seed_wf = pole_eigenfunction(p, chain.seeds[0].condition, "phi", chain.seeds[0].n)
        norm = integrate_norm(ReciprocalState(seed_wf))
        payload["new_ground_state"] = {
            "provenance": "oracle",
            "energy": seed_wf.energy,
            "reciprocal_norm_finite": not isinstance(norm, Divergent),
        }
    _emit(
        _record("susy", p, payload),
        args.format,
        args.out,
        (["x", "v_base", "v_partner"], rows),
    )
    return 0


def _check(name: str, passed: bool, value, tolerance) -> dict:
    return {"name": name, "passed": bool(passed), "value": value, "tolerance": tolerance}


def _require(args, *names) -> None:
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        flags = ", ".join("--N" if n == "order" else f"--{n.replace('lam', 'lambda')}" for n in missing)
        raise PreconditionFailed(f"this suite needs {flags}")


def _suite_equivalence(args) -> tuple[list[dict], dict]:
    _require(args, "alpha", "beta", "order")
    header = {"alpha": args.alpha, "beta": args.beta, "N": args.order}
    try:
        report = verify_equivalence(args.alpha, args.beta, args.order)
    except PreconditionFailed as exc:
        return (
            [_check("preconditions", False, str(exc), None)],
            {**header, "precondition_failure": str(exc)},
        )
    checks = [
        _check("potential_pointwise_match", report.max_potential_diff < 1e-7, report.max_potential_diff, 1e-7),
        _check("oracle_spectra_match", report.max_energy_diff < 1e-4, report.max_energy_diff, 1e-4),
    ]
    extra = {
        **header,
        "spectrum_anti_bound_route": {"provenance": "oracle", "energies": list(report.spectrum_anti_bound_route)},
        "spectrum_ground_chain_route": {"provenance": "oracle", "energies": list(report.spectrum_ground_chain_route)},
        "expected_energies": {"provenance": "analytic", "energies": list(report.expected_energies)},
    }
    return checks, extra


def _suite_shape_invariance(args) -> tuple[list[dict], dict]:
    _require(args, "lam", "beta")
    p = ModelParams(args.lam, args.beta)
    xs = np.linspace(-10.0, 10.0, 401)
    partner1 = partner_potential_first_order(p, SeedSpec(SeedKind.GROUND_STATE, 1, 0))
    diff1 = max(abs(partner1(float(x)) - potential(p.shifted(-1.0), float(x))) for x in xs)
    chain = SusyChain(
        p, (SeedSpec(SeedKind.GROUND_STATE, 1, 0), SeedSpec(SeedKind.BOUND_EXCITED, 1, 1))
    )
    partner2 = partner_potential_wronskian(chain)
    diff2 = max(abs(partner2(float(x)) - potential(p.shifted(-2.0), float(x))) for x in xs)
    checks = [
        _check("first_order_equals_lambda_minus_1", diff1 < 1e-9, diff1, 1e-9),
        _check("wronskian_chain_equals_lambda_minus_2", diff2 < 1e-8, diff2, 1e-8),
    ]
    return checks, {}


def _suite_flux(args) -> tuple[list[dict], dict]:
    _require(args, "lam", "beta")
    p = ModelParams(args.lam, args.beta)
    energies = [2 * p.beta + 0.5 + 1.9 * i for i in range(10)]
    worst = max(flux_defect(p, e) for e in energies)
    free = transfer_matrix(ModelParams(0.5, 0.0), 1.0)
    free_defect = max(
        abs(free.t11 - 1.0), abs(free.t22 - 1.0), abs(free.t12), abs(free.t21)
    )
    checks = [
        _check("flux_conservation", worst < 1e-8, worst, 1e-8),
        _check("free_particle_identity", free_defect < 1e-10, free_defect, 1e-10),
    ]
    return checks, {}


def _suite_poles(args) -> tuple[list[dict], dict]:
    _require(args, "lam", "beta")
    p = ModelParams(args.lam, args.beta)
    enumeration = enumerate_poles(p, args.n_cap)
    results = [verify_pole(p, r) for r in enumeration.records]
    worst_residual = max(r.condition_residual for r in results)
    all_decay = all(r.passed for r in results)
    checks = [
        _check("condition_residuals", worst_residual < 1e-10, worst_residual, 1e-10),
        _check("t22_simple_zero_decay", all_decay, None, None),
    ]
    return checks, {"notes": list(enumeration.notes)}


def _suite_no_resonances(args) -> tuple[list[dict], dict]:
    _require(args, "lam", "beta")
    p = ModelParams(args.lam, args.beta)
    smallest = min_t22_on_rectangle(p)
    return [_check("min_t22_on_rectangle", smallest > 1e-3, smallest, 1e-3)], {}


_SUITES = {
    "equivalence": _suite_equivalence,
    "shape-invariance": _suite_shape_invariance,
    "flux": _suite_flux,
    "poles": _suite_poles,
    "no-resonances": _suite_no_resonances,
}


def _cmd_verify(args) -> int:
    checks, extra = _SUITES[args.suite](args)
    passed = all(c["passed"] for c in checks)
    payload = {"suite": args.suite, "passed": passed, "checks": checks}
    payload.update(extra)
    params = None
    if args.suite != "equivalence" and args.lam is not None:
        params = ModelParams(args.lam, args.beta)
    _emit(_record("verify", params, payload), args.format, args.out, None)
    return 0 if passed else 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rm2",
        description=(
            "Scattering data, S-matrix pole classification and SUSY partners "
            "of the Rosen-Morse II potential"
        ),
    )
    parser.add_argument("--version", action="version", version=f"rm2 {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_common(sp, *, grid_default="-10:10:401"):
        sp.add_argument("--lambda", dest="lam", type=float, required=True)
        sp.add_argument("--beta", type=float, required=True)
        sp.add_argument("--grid", type=_parse_grid, default=_parse_grid(grid_default))
        sp.add_argument("--format", choices=("csv", "json"), default="json")
        sp.add_argument("--out", default=None)

    sp = sub.add_parser("potential", help="potential values on a grid")
    add_common(sp)
    sp.set_defaults(handler=_cmd_potential)

    sp = sub.add_parser("poles", help="classified S-matrix pole table")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--n-cap", type=int, default=20)
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--out", default=None)
    sp.set_defaults(handler=_cmd_poles)

    sp = sub.add_parser("wavefunction", help="pole eigenfunction or general solution on a grid")
    add_common(sp)
    sp.add_argument("--condition", type=int, choices=(1, 2))
    sp.add_argument("--n", type=int)
    sp.add_argument("--family", choices=("phi", "psi"), default="phi")
    sp.add_argument("--energy", type=float, default=None, help="evaluate the general solution at this energy")
    sp.set_defaults(handler=_cmd_wavefunction)

    sp = sub.add_parser("smatrix", help="transfer and scattering matrices at one energy")
    sp.add_argument("--lambda", dest="lam", type=float, required=True)
    sp.add_argument("--beta", type=float, required=True)
    sp.add_argument("--energy", type=float, required=True)
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--out", default=None)
    sp.set_defaults(handler=_cmd_smatrix)

    sp = sub.add_parser("susy", help="SUSY partner potential, states and oracle spectra")
    add_common(sp)
    sp.add_argument("--seed-kind", choices=("ground", "bound", "redundant", "antibound"), required=True)
    sp.add_argument("--n", type=int, action="append", help="seed index (repeatable for chains)")
    sp.add_argument("--condition", type=int, choices=(1, 2))
    sp.add_argument("--order", type=int, default=None, help="ground-chain length")
    sp.set_defaults(handler=_cmd_susy)

    sp = sub.add_parser("verify", help="run a named verification suite")
    sp.add_argument("suite", choices=sorted(_SUITES))
    sp.add_argument("--lambda", dest="lam", type=float, default=None)
    sp.add_argument("--beta", type=float, default=None)
    sp.add_argument("--alpha", type=float, default=None)
    sp.add_argument("--N", dest="order", type=int, default=None)
    sp.add_argument("--n-cap", type=int, default=12)
    sp.add_argument("--format", choices=("csv", "json"), default="json")
    sp.add_argument("--out", default=None)
    sp.set_defaults(handler=_cmd_verify)

    return parser


def main(argv=None) -> int:
    apply_env_overrides()
    args = build_parser().parse_args(argv)
    try:
        return args.handler(args)
    except RM2Error as exc:
        error = {
            "schema_version": SCHEMA_VERSION,
            "error": type(exc).__name__,
            "message": str(exc),
        }
        sys.stderr.write(json.dumps(error, indent=2, sort_keys=True) + "\n")
        return 2


if __name__ == "__main__":
    sys.exit(main())
