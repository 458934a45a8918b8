"""Command-line interface: ``maglat <subcommand> [options]``."""

from __future__ import annotations

import argparse
import json
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import lattice_hubbard as lh
from . import saw_magnetics as saw
from . import scenarios as scn
from . import spin_floquet as sf
from . import trap_design as td
from . import wire_field as wf
from .core import MATERIALS, SAW_FIELDS, WIRE_FIELDS, recoil_energy
from .units import UnitError, parse_quantity


def _qty(unit):
    def conv(text):
        try:
            return parse_quantity(text if not _is_number(text) else float(text), unit)
        except UnitError as e:
            raise argparse.ArgumentTypeError(str(e)) from None
    conv.__name__ = f"quantity[{unit}]"
    return conv


def _is_number(text):
    try:
        float(text)
        return True
    except ValueError:
        return False


def _global_flags(p, suppress=False):
    d = (lambda v: argparse.SUPPRESS) if suppress else (lambda v: v)
    p.add_argument("--out", default=d(None), help="output directory (default: stdout)")
    p.add_argument("--format", choices=("csv", "json"), default=d(None), help="primary output format")
    p.add_argument("--strict", action="store_true", default=d(False), help="reject unknown config keys")
    p.add_argument("--seed", type=int, default=d(None), help="seed for random site potentials")
    p.add_argument("--threads", type=int, default=d(None),
                   help="worker threads for sweeps (env MAGLAT_THREADS as fallback)")


class _Parser(argparse.ArgumentParser):
    """Usage errors exit with the invalid-config code and a JSON error record."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stdout.write(scn.dumps(scn.error_report(scn.EXIT_CONFIG, "usage", message)))
        sys.exit(scn.EXIT_CONFIG)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="maglat", description="Magnetic spin-lattice design calculator")
    _global_flags(parser)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add(name, help):
        p = sub.add_parser(name, help=help)
        _global_flags(p, suppress=True)
        return p

    p = add("table1", "Rabi frequencies per material and field level")
    p.add_argument("--wire-fields", nargs=2, type=_qty("T"), default=WIRE_FIELDS, metavar=("LOW", "HIGH"))
    p.add_argument("--saw-fields", nargs=2, type=_qty("T"), default=SAW_FIELDS, metavar=("LOW", "HIGH"))

    p = add("case-study", "run a named case study and compare with expectations")
    p.add_argument("name", choices=sorted(scn.CASE_STUDIES))
    p.add_argument("--no-interaction", action="store_true", help="skip the screening bisection")

    p = add("trap-check", "requirement chain for a scenario file")
    p.add_argument("scenario")

    p = add("wire-field", "field map and sine fits above a meandering wire")
    p.add_argument("--n-wires", type=int, default=50)
    p.add_argument("--a", type=_qty("m"), default=1e-6, help="period (default 1 um)")
    p.add_argument("--d", type=_qty("m"), default=None, help="electron depth (default a)")
    p.add_argument("--current", type=float, default=1e-3, help="A")
    p.add_argument("--g", type=float, default=14.9)
    p.add_argument("--cross-section", nargs=2, type=_qty("m"), default=None, metavar=("W", "H"))
    p.add_argument("--samples-per-a", type=int, default=32)

    p = add("rabi", "Rabi amplitudes of the wire array")
    p.add_argument("--d", type=_qty("m"), required=True)
    p.add_argument("--a", type=_qty("m"), required=True)
    p.add_argument("--current", type=float, required=True)
    p.add_argument("--g", type=float, required=True)

    p = add("saw-stray", "stray field above a SAW-driven magnetostrictive film")
    p.add_argument("--frequency", nargs="+", type=_qty("Hz"), default=None,
                   help="SAW frequencies in cycles/s, e.g. '25 GHz'")
    p.add_argument("--x-over-a", nargs="+", type=float, default=[0.1, 0.2, 0.3, 0.5, 1.0])
    p.add_argument("--thickness", type=_qty("m"), default=25e-9)

    p = add("hybrid", "hybrid strain plus magnetic potential amplitudes")
    for k in ("rabi", "delta", "v-saw", "e-s"):
        p.add_argument(f"--{k}", type=_qty("ueV"), required=True)

    p = add("bands", "Bloch bands of a sin^2 or adiabatic lattice")
    p.add_argument("--v0", type=float, default=None, help="sin^2 depth in units of E_R")
    p.add_argument("--rabi", type=_qty("ueV"))
    p.add_argument("--delta", type=_qty("ueV"))
    p.add_argument("--a", type=_qty("m"))
    p.add_argument("--mass", type=float, help="effective mass in m0")
    p.add_argument("--branch", type=int, choices=(-1, 1), default=-1)
    p.add_argument("--n-q", type=int, default=32)
    p.add_argument("--n-bands", type=int, default=4)

    p = add("hubbard", "Hubbard parameters and the t_rat sweep")
    p.add_argument("--material", choices=sorted(MATERIALS), default="InSb_heavy_hole")
    p.add_argument("--rabi", type=_qty("ueV"), required=True)
    p.add_argument("--delta", type=_qty("ueV"), required=True)
    p.add_argument("--a", type=_qty("m"), required=True)
    p.add_argument("--d-scr", type=str, default=None, help="screening distance or 'inf'")
    p.add_argument("--omega-dr", type=_qty("ueV"), default=None)
    p.add_argument("--omega3", type=_qty("ueV"), default=0.0)
    p.add_argument("--n-sites", type=int, default=0)
    p.add_argument("--mu-width", type=_qty("ueV"), default=0.0)
    p.add_argument("--sweep-x", nargs="+", type=float, default=None, help="Omega0/Delta values")
    p.add_argument("--sweep-y", nargs="+", type=float, default=None, help="Omega_dr/Omega0 values")

    p = add("floquet-compare", "full versus Magnus-averaged spin dynamics")
    p.add_argument("--delta-over-omega", type=float, default=0.2)
    p.add_argument("--rabi-over-omega", type=float, default=0.1)
    p.add_argument("--periods", type=int, default=10)
    p.add_argument("--order", type=int, choices=(0, 1, 2), default=2)
    p.add_argument("--coefficients", choices=("exact", "printed"), default="exact")

    p = add("stability-diagram", "generalized Mathieu stability diagram")
    p.add_argument("--q-range", nargs=2, type=float, default=(0.0, 1.2))
    p.add_argument("--r-range", nargs=2, type=float, default=(0.0, 0.5))
    p.add_argument("--eta", type=float, default=0.1)
    p.add_argument("--resolution", nargs=2, type=int, default=(41, 41), metavar=("NQ", "NR"))
    p.add_argument("--method", choices=("auto", "monodromy", "lyapunov"), default="auto")
    p.add_argument("--pgm", default=None, help="also write a PGM bitmap to this file")

    p = add("run", "execute a scenario file")
    p.add_argument("scenario")
    return parser


# --- output helpers ----------------------------------------------------------

def _emit(args, files: dict, stdout_key=None):
    """Write every file into --out, or print the selected one to stdout."""
    if args.out:
        out = Path(args.out)
        out.mkdir(parents=True, exist_ok=True)
        for name, text in sorted(files.items()):
            mode = "wb" if isinstance(text, bytes) else "w"
            with open(out / name, mode, **({} if mode == "wb" else {"newline": "\n"})) as f:
                f.write(text)
        return
    key = stdout_key or next(iter(files))
    sys.stdout.write(files[key])


def _fmt(args, default):
    return args.format or default


# --- subcommands ------------------------------------------------------------

def cmd_table1(args):
    rows = scn.table1(tuple(args.wire_fields), tuple(args.saw_fields))
    if _fmt(args, "csv") == "json":
        _emit(args, {"table1.json": scn.dumps([r.to_dict() for r in rows])})
    else:
        _emit(args, {"table1.csv": scn.table1_csv(rows)})
    return 0


def cmd_case_study(args):
    rep = scn.case_study(args.name, with_interaction=not args.no_interaction)
    _emit(args, {f"{args.name}.json": scn.dumps(rep)})
    if not rep["passed"]:
        for c in rep["checks"]:
            if not c["passed"]:
                print(f"mismatch {c['quantity']}: got {c['got']:.4g}, expected {c['expected']:.4g}",
                      file=sys.stderr)
        return scn.EXIT_MISMATCH
    return 0


def _trap_table(rep: dict) -> str:
    lines = [f"V0        {rep['V0']:.4g} ueV", f"omega_HO  {rep['omega_ho']:.4g} ueV (softer branch)",
             f"E_R       {rep['E_R']:.4g} ueV", f"n_b       {rep['n_b_ratio']:.3g} (V0/omega_HO), "
             f"{rep['n_b_sqrt']:.3g} (sqrt(V0/4E_R))", f"chi       {rep['chi']:.3g}",
             f"eta_loss  {rep['eta_loss']:.3g}", "", f"{'inequality':<24}{'ratio':>10}{'thresh':>8}  ok"]
    for l in rep["chain"]:
        lines.append(f"{l['name']:<24}{l['ratio']:>10.3g}{l['threshold']:>8.3g}  {'yes' if l['passed'] else 'NO'}")
    lines.append(f"verdict: {'satisfied' if rep['verdict'] else 'violated'}")
    return "\n".join(lines) + "\n"


def cmd_trap_check(args):
    try:
        raw = json.loads(Path(args.scenario).read_text())
        sc = scn.parse_scenario(raw, args.strict)
        if sc.drive is None:
            raise scn.ConfigError("drive", "missing")
    except (OSError, json.JSONDecodeError) as e:
        sys.stdout.write(scn.dumps(scn.error_report(1, "config", str(e))))
        return scn.EXIT_CONFIG
    except scn.ConfigError as e:
        sys.stdout.write(scn.dumps(scn.error_report(1, "config", str(e), e.key)))
        return scn.EXIT_CONFIG
    rep = td.check_requirements(sc.material, sc.drive, sc.environment).to_dict()
    files = {"trap_check.json": scn.dumps(rep), "trap_check.txt": _trap_table(rep)}
    _emit(args, files, "trap_check.json" if _fmt(args, "csv") == "json" else "trap_check.txt")
    return 0


def cmd_wire_field(args):
    d = args.d if args.d is not None else args.a
    geom = wf.WireGeometry(args.n_wires, args.a, d, args.current,
                           cross_section=tuple(args.cross_section) if args.cross_section else None)
    rep, fm = wf.wire_report(geom, args.g, args.samples_per_a)
    files = {"wire_field.csv": fm.to_csv(), "wire_report.json": scn.dumps(rep)}
    _emit(args, files, "wire_report.json" if _fmt(args, "csv") == "json" else "wire_field.csv")
    return 0


def cmd_rabi(args):
    amps = wf.rabi_amplitudes(args.d, args.a, args.current, args.g)
    _emit(args, {"rabi.json": scn.dumps(amps.to_dict())})
    return 0


def cmd_saw_stray(args):
    film = saw.SawFilmSpec(thickness=args.thickness)
    freqs = list(args.frequency) if args.frequency else [film.frequency]
    rows = saw.stray_field_map(film, args.x_over_a, freqs)
    if _fmt(args, "csv") == "json":
        _emit(args, {"saw_stray.json": scn.dumps([{"x": x, "f": f, "B1": b} for x, f, b in rows])})
    else:
        _emit(args, {"saw_stray.csv": saw.stray_csv(rows)})
    return 0


def cmd_hybrid(args):
    hp = saw.hybrid_potential(args.rabi, args.delta, args.v_saw, args.e_s)
    _emit(args, {"hybrid.json": scn.dumps(hp.to_dict())})
    return 0


def cmd_bands(args):
    if args.v0 is not None:
        pot, e_r = lh.LatticePotential.sin2(args.v0), 1.0
    else:
        if None in (args.rabi, args.delta, args.a, args.mass):
            raise scn.ConfigError("bands", "give --v0, or all of --rabi --delta --a --mass")
        e_r = recoil_energy(args.a, args.mass)
        pot = lh.adiabatic_potential(args.rabi, args.delta, args.branch, e_r)
    b = lh.band_structure(pot, n_q=args.n_q, n_bands=args.n_bands)
    if _fmt(args, "csv") == "json":
        _emit(args, {"bands.json": scn.dumps({"q": b.q, "energies": b.energies * e_r, "cutoff": b.cutoff,
                                              "t_c": lh.tc_numeric(b) * e_r})})
    else:
        _emit(args, {"bands.csv": b.to_csv(e_r)})
    return 0


def cmd_hubbard(args):
    mat = MATERIALS[args.material]
    e_r = recoil_energy(args.a, mat.eff_mass)
    d_scr = None
    if args.d_scr is not None:
        d_scr = math.inf if args.d_scr == "inf" else parse_quantity(args.d_scr, "m")
    hp = lh.hubbard_parameters(args.rabi, args.delta, args.a, e_r, eps_r=mat.dielectric_const,
                               lam=max(mat.rashba, mat.dresselhaus), d_scr=d_scr, omega_dr=args.omega_dr,
                               omega3=args.omega3, n_sites=args.n_sites, mu_width=args.mu_width,
                               seed=args.seed)
    files = {"hubbard.json": scn.dumps(hp.to_dict())}
    if args.sweep_x or args.sweep_y:
        x = args.sweep_x or list(np.linspace(0.05, 1.0, 12))
        y = args.sweep_y or list(np.logspace(-3, 0, 10))
        files["t_ratio.csv"] = scn._t_ratio_sweep(x, y, args.threads).to_csv()
    _emit(args, files, "hubbard.json")
    return 0


def cmd_floquet(args):
    full, strob = sf.floquet_comparison(args.delta_over_omega, args.rabi_over_omega, args.periods,
                                        order=args.order, coefficients=args.coefficients)
    errs = {o: sf.stroboscopic_error(args.delta_over_omega, args.rabi_over_omega, o, args.periods,
                                     args.coefficients) for o in (0, 1, 2)}
    files = {"floquet_full.csv": full.to_csv(), "floquet_stroboscopic.csv": strob.to_csv(),
             "floquet_errors.json": scn.dumps({f"order_{k}": v for k, v in errs.items()})}
    _emit(args, files, "floquet_errors.json" if _fmt(args, "csv") == "json" else "floquet_full.csv")
    return 0


def cmd_stability(args):
    d = scn._stability_diagram(tuple(args.q_range), tuple(args.r_range), args.eta,
                               tuple(args.resolution), args.method, args.threads)
    files = {"stability.csv": d.to_csv()}
    if args.pgm:
        Path(args.pgm).write_bytes(d.to_pgm())
    _emit(args, files)
    return 0


def cmd_run(args):
    res = scn.run_scenario(args.scenario, args.strict, args.seed, args.threads)
    if args.out:
        scn.write_outputs(res, args.out)
    else:
        sys.stdout.write(scn.dumps(res.report))
    return res.exit_code


COMMANDS = {
    "table1": cmd_table1, "case-study": cmd_case_study, "trap-check": cmd_trap_check,
    "wire-field": cmd_wire_field, "rabi": cmd_rabi, "saw-stray": cmd_saw_stray, "hybrid": cmd_hybrid,
    "bands": cmd_bands, "hubbard": cmd_hubbard, "floquet-compare": cmd_floquet,
    "stability-diagram": cmd_stability, "run": cmd_run,
}


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.threads is None and os.environ.get("MAGLAT_THREADS"):
        args.threads = int(os.environ["MAGLAT_THREADS"])
    try:
        return COMMANDS[args.command](args)
    except scn.ConfigError as e:
        sys.stdout.write(scn.dumps(scn.error_report(scn.EXIT_CONFIG, "config", str(e), e.key)))
        return scn.EXIT_CONFIG
    except scn.NUMERIC_ERRORS as e:
        sys.stdout.write(scn.dumps(scn.error_report(scn.EXIT_NUMERIC, "numerical", str(e))))
        return scn.EXIT_NUMERIC
    except ValueError as e:
        sys.stdout.write(scn.dumps(scn.error_report(scn.EXIT_CONFIG, "config", str(e))))
        return scn.EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
