"""Scenario files, the Rabi-frequency table and the three case studies.

A scenario is a JSON document with an explicit ``schema_version``.  Unknown
keys are collected as warnings, or rejected in strict mode.  Quantities may
be bare numbers (in the documented default unit) or strings like "380 GHz".
Energies given in frequency units are angular (hbar * omega); keys named
``frequency`` are in cycles per second.

Exit codes of run_scenario: 0 ok, 1 invalid config, 2 numerical
non-convergence, 3 expectation mismatch.
"""

from __future__ import annotations

import json
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import lattice_hubbard as lh
from . import saw_magnetics as saw
from . import spin_floquet as sf
from . import stability as st
from . import trap_design as td
from . import wire_field as wf
from .core import (MATERIALS, SAW_FIELDS, TABLE_MATERIALS, TABLE_REFERENCE, WIRE_FIELDS, DriveSpec,
                   EnvironmentSpec, MaterialSpec, recoil_energy, zeeman_rabi)
from .units import HBAR_UEV_S, UnitError, parse_quantity

SCHEMA_VERSION = 1

EXIT_OK, EXIT_CONFIG, EXIT_NUMERIC, EXIT_MISMATCH = 0, 1, 2, 3

NUMERIC_ERRORS = (lh.BandConvergenceError, lh.BandCrossingError, td.ConvergenceError,
                  td.FlatTrapError, st.StabilityError, sf.PropagationError)


class ConfigError(ValueError):
    def __init__(self, key, message):
        super().__init__(f"{key}: {message}")
        self.key = key


# --- JSON helpers -----------------------------------------------------------

def _clean(obj):
    """Convert numpy scalars/arrays and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return _clean(obj.tolist())
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        v = float(obj)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), indent=2, sort_keys=True, ensure_ascii=True) + "\n"


# --- Rabi-frequency table ------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    material: str
    g_low: float
    g_high: float
    wire: tuple
    saw: tuple
    reference: tuple

    @property
    def values(self):
        return (*self.wire, *self.saw)

    @property
    def deviations(self):
        return tuple(v / r - 1 for v, r in zip(self.values, self.reference))

    def to_dict(self):
        d = asdict(self)
        d["deviations"] = self.deviations
        return d


def table1(wire_fields=WIRE_FIELDS, saw_fields=SAW_FIELDS) -> list[TableRow]:
    """Omega0 = g mu_B B1 (ueV) per host and field level.

    The low end of a range uses the smaller g and field, the high end the larger.
    """
    rows = []
    for m in TABLE_MATERIALS:
        wire = (zeeman_rabi(m.g_low, wire_fields[0]), zeeman_rabi(m.g_high, wire_fields[1]))
        sw = (zeeman_rabi(m.g_low, saw_fields[0]), zeeman_rabi(m.g_high, saw_fields[1]))
        rows.append(TableRow(m.name, m.g_low, m.g_high, wire, sw, TABLE_REFERENCE[m.name]))
    return rows


def table1_csv(rows) -> str:
    lines = ["# units: Omega0 in ueV; deviation relative to the reference value",
             "material,g_low,g_high,wire_low,wire_high,saw_low,saw_high,"
             "ref_wire_low,ref_wire_high,ref_saw_low,ref_saw_high,max_abs_deviation"]
    for r in rows:
        vals = ",".join(f"{v:.6g}" for v in (*r.values, *r.reference))
        dev = max(abs(d) for d in r.deviations)
        lines.append(f"{r.material},{r.g_low:g},{r.g_high:g},{vals},{dev:.4f}")
    return "\n".join(lines) + "\n"


# --- case studies -----------------------------------------------------------

@dataclass(frozen=True)
class Expectation:
    quantity: str
    value: float
    rel_tol: float | None = None
    factor: float | None = None

    def __post_init__(self):
        if (self.rel_tol is None) == (self.factor is None):
            raise ValueError("give exactly one of rel_tol or factor")
        if (self.rel_tol or self.factor) <= 0:
            raise ValueError("tolerances must be positive")

    def check(self, got: float) -> dict:
        if self.rel_tol is not None:
            dev = got / self.value - 1
            ok = abs(dev) <= self.rel_tol
        else:
            dev = got / self.value
            ok = 1 / self.factor <= dev <= self.factor
        return {"quantity": self.quantity, "expected": self.value, "got": got,
                "rel_tol": self.rel_tol, "factor": self.factor,
                "deviation": dev, "passed": bool(ok)}


@dataclass(frozen=True)
class CaseStudy:
    name: str
    material: str
    rabi: float       # ueV
    detuning: float   # ueV
    frequency: float  # Hz (cycles)
    a: float          # m
    temperature: float = 0.01
    expectations: tuple = field(default_factory=tuple)

    def drive(self) -> DriveSpec:
        return DriveSpec(omega=2 * math.pi * self.frequency, detuning=self.detuning / HBAR_UEV_S,
                         rabi=self.rabi / HBAR_UEV_S, a=self.a, g_factor=MATERIALS[self.material].g_factor)


def _exact(q, v):
    return Expectation(q, v, rel_tol=0.05)


CASE_STUDIES = {
    "inas_electron": CaseStudy(
        "inas_electron", "InAs_electron", rabi=86.0, detuning=1.0, frequency=22e9, a=900e-9,
        expectations=(_exact("V0", 43.0), _exact("E_R", 20.0), _exact("omega", 92.0),
                      Expectation("t_c", 5.2, rel_tol=0.35))),
    "inas_heavy_hole": CaseStudy(
        "inas_heavy_hole", "InAs_heavy_hole", rabi=100.0, detuning=250.0, frequency=25e9, a=500e-9,
        expectations=(_exact("V0", 10.0), _exact("E_R", 1.8), _exact("omega", 103.0),
                      Expectation("t_c", 0.2, rel_tol=0.35),
                      Expectation("omega_ho", 5.4, factor=2.0))),
    "insb_heavy_hole": CaseStudy(
        "insb_heavy_hole", "InSb_heavy_hole", rabi=200.0, detuning=25.0, frequency=50e9, a=100e-9,
        expectations=(_exact("V0", 90.0), _exact("E_R", 60.0), _exact("omega", 207.0),
                      Expectation("t_c", 18.0, rel_tol=0.35))),
}


def case_study(name: str, with_interaction=True) -> dict:
    """Trap report, Hubbard parameters and expectation checks for a named case."""
    try:
        case = CASE_STUDIES[name]
    except KeyError:
        raise ConfigError("case", f"unknown case study {name!r}; known: {sorted(CASE_STUDIES)}") from None
    mat = MATERIALS[case.material]
    drive = case.drive()
    env = EnvironmentSpec(case.temperature)
    trap = td.check_requirements(mat, drive, env)
    hub = lh.hubbard_parameters(case.rabi, case.detuning, case.a, trap.E_R, eps_r=mat.dielectric_const,
                                lam=max(mat.rashba, mat.dresselhaus))
    quantities = {
        "V0": trap.V0, "E_R": trap.E_R, "omega": trap.omega, "omega_ho": trap.omega_ho,
        "omega_ho_engineering": trap.harmonic.engineering, "t_c": hub.t_c_analytic,
        "t_c_band": hub.t_c_numeric, "t_soi": hub.t_soi,
    }
    screening = None
    if with_interaction:
        pair = lh.sublattice_wannier(case.rabi / trap.E_R, case.detuning / trap.E_R, min_gap_ratio=0.5)
        ws = pair.minus
        tc = pair.tc_minus * trap.E_R
        d = lh.screening_for_ratio(ws, case.a, mat.dielectric_const, 10 * tc)
        u_inf = lh.onsite_interaction(ws, case.a, mat.dielectric_const).U
        screening = {"d_scr_for_U_10tc": d, "t_c_band": tc, "U_unscreened": u_inf,
                     "U_at_d_scr": lh.onsite_interaction(ws, case.a, mat.dielectric_const, d).U}
    checks = [e.check(quantities[e.quantity]) for e in case.expectations]
    return {
        "case": name, "material": mat.to_dict(), "drive": drive.to_dict(),
        "environment": env.to_dict(), "trap": trap.to_dict(), "hubbard": hub.to_dict(),
        "quantities": quantities, "screening": screening, "checks": checks,
        "passed": all(c["passed"] for c in checks),
    }


# --- scenario parsing -----------------------------------------------------------

TOP_KEYS = {"schema_version", "name", "material", "drive", "environment", "implementation",
            "analyses", "expectations", "seed"}
MATERIAL_UNITS = {"g_factor": None, "eff_mass": "m0", "dielectric_const": None, "sound_speed": "m/s",
                  "rashba": "m/s", "dresselhaus": "m/s", "phonon_rate": "ueV", "linewidth": "ueV"}
DRIVE_KEYS = {"rabi", "detuning", "omega", "frequency", "a", "g_factor", "B0", "B1"}
WIRE_KEYS = {"type", "n_wires", "a", "d", "current", "cross_section", "frequency"}
SAW_UNITS = {"thickness": "m", "ms_tesla": "T", "alpha": None, "g_film": None, "h_me": "T",
             "strain": None, "frequency": "Hz", "sound_speed": "m/s", "demag": None}
ANALYSIS_KEYS = {
    "trap_check": {"much_less", "less_approx"},
    "spectrum": {"n_periods", "n_levels"},
    "bands": {"branch", "n_q", "n_bands"},
    "hubbard": {"d_scr", "z0", "omega_dr", "omega3", "n_sites", "mu_values", "mu_width", "t_ratio_sweep"},
    "wire_field": {"z_samples_per_a"},
    "rabi": set(),
    "saw_stray": {"x_over_a", "frequencies"},
    "polder": {"bias"},
    "hybrid": {"v_saw", "e_s"},
    "floquet": {"n_periods", "order", "coefficients"},
    "stability": {"q_range", "r_range", "eta", "resolution", "method"},
}


@dataclass
class Scenario:
    name: str
    material: MaterialSpec
    drive: DriveSpec | None
    environment: EnvironmentSpec
    implementation: dict
    analyses: list
    expectations: list
    seed: int | None
    raw: dict
    warnings: list


def _check_keys(obj, allowed, where, strict, warnings):
    if not isinstance(obj, dict):
        raise ConfigError(where, "expected an object")
    for k in obj:
        if k not in allowed:
            msg = f"unknown key {k!r}"
            if strict:
                raise ConfigError(f"{where}.{k}" if where else k, msg)
            warnings.append(f"{where}.{k}: ignored" if where else f"{k}: ignored")


def _q(obj, key, unit, where, default=None, required=False):
    if key not in obj:
        if required:
            raise ConfigError(f"{where}.{key}", "missing")
        return default
    try:
        if unit is None:
            v = obj[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)):
                raise UnitError(f"expected a number, got {v!r}")
            return float(v)
        return parse_quantity(obj[key], unit)
    except UnitError as e:
        raise ConfigError(f"{where}.{key}", str(e)) from None


def _parse_material(obj, strict, warnings):
    _check_keys(obj, set(MATERIAL_UNITS) | {"preset", "name"}, "material", strict, warnings)
    base = {}
    if "preset" in obj:
        try:
            base = MATERIALS[obj["preset"]].to_dict()
        except KeyError:
            raise ConfigError("material.preset", f"unknown preset {obj['preset']!r}") from None
    vals = dict(base)
    vals["name"] = obj.get("name", base.get("name", "custom"))
    for k, unit in MATERIAL_UNITS.items():
        if k in obj:
            vals[k] = _q(obj, k, unit, "material")
    for k in ("g_factor", "eff_mass"):
        if k not in vals:
            raise ConfigError(f"material.{k}", "missing")
    try:
        return MaterialSpec(**vals)
    except ValueError as e:
        raise ConfigError("material", str(e)) from None


def _parse_drive(obj, material, strict, warnings):
    _check_keys(obj, DRIVE_KEYS, "drive", strict, warnings)
    a = _q(obj, "a", "m", "drive", required=True)
    g = _q(obj, "g_factor", None, "drive", default=material.g_factor)
    if "omega" in obj and "frequency" in obj:
        raise ConfigError("drive.frequency", "give omega or frequency, not both")
    if "frequency" in obj:
        # frequency is in cycles per second
        omega_ueV = 2 * math.pi * _q(obj, "frequency", "Hz", "drive") * HBAR_UEV_S
    else:
        omega_ueV = _q(obj, "omega", "ueV", "drive", required=True)
    if "B1" in obj:
        rabi = zeeman_rabi(g, _q(obj, "B1", "T", "drive"))
    else:
        rabi = _q(obj, "rabi", "ueV", "drive", required=True)
    if "B0" in obj:
        delta = zeeman_rabi(g, _q(obj, "B0", "T", "drive")) - omega_ueV
    else:
        delta = _q(obj, "detuning", "ueV", "drive", required=True)
    try:
        return DriveSpec.from_energies(rabi, delta, omega_ueV, a, g)
    except ValueError as e:
        raise ConfigError("drive", str(e)) from None


def _parse_implementation(obj, drive, strict, warnings):
    if obj is None:
        return {"type": "abstract"}
    kind = obj.get("type", "abstract")
    if kind == "abstract":
        _check_keys(obj, {"type"}, "implementation", strict, warnings)
        return {"type": "abstract"}
    if kind == "wire":
        _check_keys(obj, WIRE_KEYS, "implementation", strict, warnings)
        a = _q(obj, "a", "m", "implementation", default=drive.a if drive else None)
        if a is None:
            raise ConfigError("implementation.a", "missing")
        cs = obj.get("cross_section")
        if cs is not None:
            try:
                cs = tuple(parse_quantity(v, "m") for v in cs)
            except (UnitError, TypeError) as e:
                raise ConfigError("implementation.cross_section", str(e)) from None
        try:
            geom = wf.WireGeometry(
                n_wires=int(_q(obj, "n_wires", None, "implementation", required=True)), a=a,
                d=_q(obj, "d", "m", "implementation", required=True),
                current=_q(obj, "current", None, "implementation", required=True),
                omega=2 * math.pi * _q(obj, "frequency", "Hz", "implementation", default=0.0), cross_section=cs)
        except ValueError as e:
            raise ConfigError("implementation", str(e)) from None
        return {"type": "wire", "geometry": geom}
    if kind == "saw":
        _check_keys(obj, set(SAW_UNITS) | {"type"}, "implementation", strict, warnings)
        vals = {}
        for k, unit in SAW_UNITS.items():
            if k not in obj:
                continue
            if k == "demag":
                vals[k] = tuple(float(v) for v in obj[k])
            else:
                vals[k] = _q(obj, k, unit, "implementation")
        try:
            return {"type": "saw", "film": saw.SawFilmSpec(**vals)}
        except ValueError as e:
            raise ConfigError("implementation", str(e)) from None
    raise ConfigError("implementation.type", f"unknown implementation {kind!r}")


def parse_scenario(raw: dict, strict=False) -> Scenario:
    warnings: list[str] = []
    _check_keys(raw, TOP_KEYS, "", strict, warnings)
    if raw.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError("schema_version", f"expected {SCHEMA_VERSION}, got {raw.get('schema_version')!r}")
    if "material" not in raw:
        raise ConfigError("material", "missing")
    mat = _parse_material(raw["material"], strict, warnings)
    drive = _parse_drive(raw["drive"], mat, strict, warnings) if "drive" in raw else None
    env_obj = raw.get("environment", {})
    _check_keys(env_obj, {"temperature"}, "environment", strict, warnings)
    try:
        env = EnvironmentSpec(_q(env_obj, "temperature", "K", "environment", default=0.0))
    except ValueError as e:
        raise ConfigError("environment.temperature", str(e)) from None
    impl = _parse_implementation(raw.get("implementation"), drive, strict, warnings)
    analyses = raw.get("analyses", [])
    if not isinstance(analyses, list):
        raise ConfigError("analyses", "expected a list")
    for i, an in enumerate(analyses):
        where = f"analyses[{i}]"
        if not isinstance(an, dict) or an.get("type") not in ANALYSIS_KEYS:
            raise ConfigError(f"{where}.type", f"unknown analysis {an.get('type') if isinstance(an, dict) else an!r}")
        _check_keys(an, ANALYSIS_KEYS[an["type"]] | {"type"}, where, strict, warnings)
        if an["type"] in {"trap_check", "spectrum", "bands", "hubbard", "floquet"} and drive is None:
            raise ConfigError(f"{where}.type", "requires a drive section")
        if an["type"] in {"wire_field", "rabi"} and impl["type"] != "wire":
            raise ConfigError(f"{where}.type", "requires a wire implementation")
        if an["type"] in {"saw_stray", "polder"} and impl["type"] != "saw":
            raise ConfigError(f"{where}.type", "requires a saw implementation")
    exps = []
    for i, e in enumerate(raw.get("expectations", [])):
        where = f"expectations[{i}]"
        _check_keys(e, {"quantity", "value", "rel_tol", "factor"}, where, strict, warnings)
        try:
            exps.append(Expectation(e["quantity"], float(e["value"]), e.get("rel_tol"), e.get("factor")))
        except (KeyError, TypeError, ValueError) as err:
            raise ConfigError(where, str(err)) from None
    seed = raw.get("seed")
    if seed is not None and (not isinstance(seed, int) or seed < 0):
        raise ConfigError("seed", "must be a non-negative integer")
    return Scenario(raw.get("name", "scenario"), mat, drive, env, impl, analyses, exps, seed, raw, warnings)


# --- analyses ----------------------------------------------------------------

def _threads(threads):
    if threads:
        return int(threads)
    return int(os.environ.get("MAGLAT_THREADS", "1") or 1)


def _run_analysis(sc: Scenario, an: dict, seed, threads):
    """Returns (result dict, {filename_suffix: csv_text}, quantities)."""
    kind = an["type"]
    where = f"analysis {kind}"
    mat, drive = sc.material, sc.drive
    if kind == "trap_check":
        th = td.Thresholds(an.get("much_less", 0.1), an.get("less_approx", 1.0))
        rep = td.check_requirements(mat, drive, sc.environment, th)
        q = {"V0": rep.V0, "E_R": rep.E_R, "omega": rep.omega, "omega_ho": rep.omega_ho,
             "omega_ho_engineering": rep.harmonic.engineering}
        return rep.to_dict(), {}, q
    if kind == "spectrum":
        cmp = td.spectrum_comparison(drive.rabi_ueV, drive.detuning_ueV, drive.a, mat.eff_mass,
                                     n_periods=an.get("n_periods", 4), n_levels=an.get("n_levels", 3))
        return {"max_deviation": cmp.max_deviation, "exact_plus": cmp.exact_plus,
                "exact_minus": cmp.exact_minus, "adiabatic_plus": cmp.adiabatic_plus,
                "adiabatic_minus": cmp.adiabatic_minus, "n_points": cmp.n_points}, {}, {}
    if kind == "bands":
        E_R = recoil_energy(drive.a, mat.eff_mass)
        pot = lh.adiabatic_potential(drive.rabi_ueV, drive.detuning_ueV, int(an.get("branch", -1)), E_R)
        b = lh.band_structure(pot, n_q=an.get("n_q", 32), n_bands=an.get("n_bands", 4))
        return {"cutoff": b.cutoff, "t_c_band": lh.tc_numeric(b) * E_R, "E_R": E_R,
                "bandwidth": b.bandwidth() * E_R}, {"bands": b.to_csv(E_R)}, {"t_c_band": lh.tc_numeric(b) * E_R}
    if kind == "hubbard":
        E_R = recoil_energy(drive.a, mat.eff_mass)
        d_scr = an.get("d_scr")
        if d_scr is not None:
            d_scr = math.inf if d_scr == "inf" else parse_quantity(d_scr, "m")
        omega_dr = an.get("omega_dr")
        hp = lh.hubbard_parameters(
            drive.rabi_ueV, drive.detuning_ueV, drive.a, E_R, eps_r=mat.dielectric_const,
            lam=max(mat.rashba, mat.dresselhaus), d_scr=d_scr,
            omega_dr=None if omega_dr is None else parse_quantity(omega_dr, "ueV"),
            omega3=parse_quantity(an.get("omega3", 0.0), "ueV"), n_sites=an.get("n_sites", 0),
            mu_values=an.get("mu_values"), mu_width=parse_quantity(an.get("mu_width", 0.0), "ueV"),
            seed=seed)
        files = {}
        sweep = an.get("t_ratio_sweep")
        if sweep is not None:
            files["t_ratio"] = _t_ratio_sweep(sweep.get("x", [0.1, 0.2, 0.3]),
                                              sweep.get("y", [0.01, 0.1, 1.0]), threads).to_csv()
        q = {"t_c": hp.t_c_analytic, "t_c_band": hp.t_c_numeric, "t_soi": hp.t_soi}
        if hp.U is not None:
            q["U"] = hp.U
        return hp.to_dict(), files, q
    if kind == "wire_field":
        geom = sc.implementation["geometry"]
        rep, fm = wf.wire_report(geom, mat.g_factor, an.get("z_samples_per_a", 32),
                                 omega0=drive.omega_ueV + drive.detuning_ueV if drive else None)
        return rep, {"wire_field": fm.to_csv()}, {}
    if kind == "rabi":
        geom = sc.implementation["geometry"]
        amps = wf.rabi_amplitudes(geom.d, geom.a, geom.current, mat.g_factor)
        return amps.to_dict(), {}, {"rabi_center_x": amps.center_x}
    if kind == "saw_stray":
        film = sc.implementation["film"]
        rows = saw.stray_field_map(film, an.get("x_over_a", [0.1, 0.2, 0.3, 0.5]),
                                   [parse_quantity(f, "Hz") for f in an.get("frequencies", [film.frequency])])
        return {"n_rows": len(rows)}, {"saw_stray": saw.stray_csv(rows)}, {}
    if kind == "polder":
        film = sc.implementation["film"]
        bias = an.get("bias")
        pr = saw.polder_response(film, bias=None if bias is None else parse_quantity(bias, "T"))
        return {"bias": pr.bias, "field_gain": pr.field_gain, "enhancement": pr.enhancement,
                "m_dyn": saw.dynamic_magnetization(film, pr.bias),
                "drive_field": saw.magnetoelastic_drive(film.h_me, film.strain)}, {}, {}
    if kind == "hybrid":
        if drive is None:
            raise ConfigError(f"{where}", "requires a drive section")
        if "e_s" in an:
            e_s = parse_quantity(an["e_s"], "ueV")
        elif mat.sound_speed:
            e_s = saw.strain_energy(mat.eff_mass, mat.sound_speed)
        else:
            raise ConfigError(f"{where}.e_s", "missing and no material sound speed")
        hp = saw.hybrid_potential(drive.rabi_ueV, drive.detuning_ueV,
                                  parse_quantity(an.get("v_saw", 0.0), "ueV"), e_s)
        return hp.to_dict(), {}, {"v_plus": hp.v_plus, "v_minus": hp.v_minus}
    if kind == "floquet":
        w = drive.omega_ueV
        err = sf.stroboscopic_error(drive.detuning_ueV / w, drive.rabi_ueV / w, an.get("order", 2),
                                    an.get("n_periods", 10), an.get("coefficients", "exact"))
        return {"stroboscopic_error": err}, {}, {"stroboscopic_error": err}
    if kind == "stability":
        d = _stability_diagram(tuple(an.get("q_range", (0.0, 1.2))), tuple(an.get("r_range", (0.0, 0.5))),
                               an.get("eta", 0.1), tuple(an.get("resolution", (25, 25))),
                               an.get("method", "auto"), threads)
        return {"stable_fraction": d.stable_fraction(), "method": d.method}, {"stability": d.to_csv()}, {}
    raise ConfigError(where, "unsupported")


def _t_ratio_sweep(x, y, threads=None):
    x = list(map(float, x))
    n = _threads(threads)
    if n <= 1:
        return lh.t_ratio_sweep(x, y)
    with ThreadPoolExecutor(n) as ex:
        cols = list(ex.map(lambda xv: lh.t_ratio_sweep([xv], y), x))
    return lh.TRatioSweep(np.array(x), np.asarray(y, dtype=float),
                          np.hstack([c.t_rat for c in cols]), cols[0].V0_over_ER)


def _stability_diagram(q_range, r_range, eta, resolution, method="auto", threads=None):
    return st.diagram(q_range, r_range, eta, resolution, method, threads=_threads(threads))


@dataclass
class RunResult:
    exit_code: int
    report: dict
    files: dict  # name -> text


def error_report(code, kind, message, key=None) -> dict:
    return {"error": {"code": code, "type": kind, "message": message, "key": key}}


def run_scenario_dict(raw, strict=False, seed=None, threads=None) -> RunResult:
    try:
        sc = parse_scenario(raw, strict)
    except ConfigError as e:
        return RunResult(EXIT_CONFIG, error_report(EXIT_CONFIG, "config", str(e), e.key), {})
    seed = sc.seed if seed is None else seed
    results, files, quantities = [], {}, {}
    try:
        for i, an in enumerate(sc.analyses):
            res, fl, q = _run_analysis(sc, an, seed, threads)
            results.append({"type": an["type"], "result": res})
            for k, text in fl.items():
                files[f"{i:02d}_{k}.csv"] = text
            quantities.update(q)
    except ConfigError as e:
        return RunResult(EXIT_CONFIG, error_report(EXIT_CONFIG, "config", str(e), e.key), {})
    except UnitError as e:
        return RunResult(EXIT_CONFIG, error_report(EXIT_CONFIG, "config", str(e)), {})
    except NUMERIC_ERRORS as e:
        return RunResult(EXIT_NUMERIC, error_report(EXIT_NUMERIC, "numerical", str(e)), {})
    checks = []
    for e in sc.expectations:
        if e.quantity not in quantities:
            return RunResult(EXIT_CONFIG, error_report(
                EXIT_CONFIG, "config", f"quantity {e.quantity!r} not produced by any analysis",
                "expectations"), {})
        checks.append(e.check(quantities[e.quantity]))
    report = {
        "schema_version": SCHEMA_VERSION, "name": sc.name,
        "inputs": {"raw": sc.raw, "material": sc.material.to_dict(),
                   "drive": sc.drive.to_dict() if sc.drive else None,
                   "environment": sc.environment.to_dict(),
                   "implementation": _impl_dict(sc.implementation), "seed": seed},
        "results": results, "quantities": quantities, "checks": checks, "warnings": sc.warnings,
    }
    code = EXIT_MISMATCH if any(not c["passed"] for c in checks) else EXIT_OK
    return RunResult(code, report, files)


def _impl_dict(impl):
    out = {"type": impl["type"]}
    if "geometry" in impl:
        out.update(asdict(impl["geometry"]))
    if "film" in impl:
        out.update(impl["film"].to_dict())
    return out


def run_scenario(path, strict=False, seed=None, threads=None) -> RunResult:
    try:
        raw = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        return RunResult(EXIT_CONFIG, error_report(EXIT_CONFIG, "config", f"cannot read {path}: {e}"), {})
    return run_scenario_dict(raw, strict, seed, threads)


def write_outputs(result: RunResult, out_dir, stem="report"):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    with open(out / f"{stem}.json", "w", newline="\n") as f:
        f.write(dumps(result.report))
    for name, text in sorted(result.files.items()):
        with open(out / name, "w", newline="\n") as f:
            f.write(text)
