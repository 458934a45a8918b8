import json
import math
from pathlib import Path

import pytest

from maglat import cli
from maglat import scenarios as scn

ROOT = Path(__file__).resolve().parents[1]
SCENARIOS = sorted((ROOT / "scenarios").glob("*.json"))
GOLDEN = Path(__file__).parent / "golden"


def _close(a, b, path="$"):
    if isinstance(a, dict):
        assert isinstance(b, dict) and set(a) == set(b), path
        for k in a:
            _close(a[k], b[k], f"{path}.{k}")
    elif isinstance(a, list):
        assert isinstance(b, list) and len(a) == len(b), path
        for i, (x, y) in enumerate(zip(a, b)):
            _close(x, y, f"{path}[{i}]")
    elif isinstance(a, float) and isinstance(b, (int, float)) and not isinstance(b, bool):
        assert b == pytest.approx(a, rel=1e-8, abs=1e-300), path
    else:
        assert a == b, path


def _minimal(**over):
    raw = {"schema_version": 1, "name": "t", "material": {"preset": "InSb_heavy_hole"},
           "drive": {"rabi": "200 ueV", "detuning": "25 ueV", "frequency": "50 GHz", "a": "100 nm"},
           "analyses": []}
    raw.update(over)
    return raw


# --- table and case studies -------------------------------------------------

def test_table_scales_linearly_with_fields():
    base = scn.table1()
    doubled = scn.table1(wire_fields=(20e-3, 100e-3), saw_fields=(100e-3, 200e-3))
    for r1, r2 in zip(base, doubled):
        for v1, v2 in zip(r1.values, r2.values):
            assert v2 == pytest.approx(2 * v1, rel=1e-14)


def test_table_csv_header():
    csv = scn.table1_csv(scn.table1()).splitlines()
    assert csv[0].startswith("# units:")
    assert len(csv) == 2 + 6


def test_expectation_modes():
    assert scn.Expectation("x", 10.0, rel_tol=0.05).check(10.4)["passed"]
    assert not scn.Expectation("x", 10.0, rel_tol=0.05).check(10.6)["passed"]
    assert scn.Expectation("x", 10.0, factor=2).check(19.0)["passed"]
    assert not scn.Expectation("x", 10.0, factor=2).check(4.0)["passed"]


# --- scenario files -----------------------------------------------------------

@pytest.mark.parametrize("path", SCENARIOS, ids=lambda p: p.stem)
def test_scenario_matches_golden(path):
    res = scn.run_scenario(path, threads=1)
    assert res.exit_code == scn.EXIT_OK
    golden = json.loads((GOLDEN / path.name).read_text())
    _close(golden, json.loads(scn.dumps(res.report)))


def test_deterministic_across_thread_counts(tmp_path):
    path = ROOT / "scenarios" / "saw_film.json"
    a = scn.run_scenario(path, threads=1)
    b = scn.run_scenario(path, threads=4)
    scn.write_outputs(a, tmp_path / "a")
    scn.write_outputs(b, tmp_path / "b")
    files = sorted(p.name for p in (tmp_path / "a").iterdir())
    assert files == sorted(p.name for p in (tmp_path / "b").iterdir())
    for name in files:
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_seeded_site_potentials_reproducible():
    raw = _minimal(seed=11, analyses=[{"type": "hubbard", "n_sites": 6, "mu_width": "1 ueV"}])
    one = scn.dumps(scn.run_scenario_dict(raw).report)
    two = scn.dumps(scn.run_scenario_dict(raw).report)
    assert one == two
    other = scn.dumps(scn.run_scenario_dict(raw, seed=12).report)
    assert other != one


def test_empty_analysis_list_echoes_inputs():
    res = scn.run_scenario_dict(_minimal())
    assert res.exit_code == scn.EXIT_OK
    assert res.report["results"] == [] and res.report["inputs"]["drive"]["rabi_ueV"] == pytest.approx(200)


def test_malformed_unit_names_key():
    raw = _minimal(drive={"rabi": "200 uev!", "detuning": "25 ueV", "frequency": "50 GHz", "a": "100 nm"})
    res = scn.run_scenario_dict(raw)
    assert res.exit_code == scn.EXIT_CONFIG
    assert "rabi" in json.dumps(res.report)


def test_unknown_keys_warn_or_reject():
    raw = _minimal(colour="blue")
    lax = scn.run_scenario_dict(raw)
    assert lax.exit_code == scn.EXIT_OK and lax.report["warnings"]
    assert scn.run_scenario_dict(raw, strict=True).exit_code == scn.EXIT_CONFIG


def test_unknown_analysis_type_rejected():
    assert scn.run_scenario_dict(_minimal(analyses=[{"type": "teleport"}])).exit_code == scn.EXIT_CONFIG


def test_failed_expectation_exit_code():
    raw = _minimal(analyses=[{"type": "trap_check"}], expectations=[{"quantity": "V0", "value": 1.0, "rel_tol": 0.01}])
    res = scn.run_scenario_dict(raw)
    assert res.exit_code == scn.EXIT_MISMATCH
    assert not res.report["checks"][0]["passed"]


def test_numerical_failure_exit_code():
    # a very shallow lattice has no isolated lowest band
    raw = _minimal(drive={"rabi": "2 ueV", "detuning": "25 ueV", "frequency": "50 GHz", "a": "100 nm"},
                   analyses=[{"type": "hubbard"}])
    assert scn.run_scenario_dict(raw).exit_code == scn.EXIT_NUMERIC


def test_non_finite_values_serialise():
    text = scn.dumps({"x": math.inf, "y": math.nan})
    assert json.loads(text) == {"x": "inf", "y": "nan"}


# --- command line ---------------------------------------------------------------

def test_cli_run_writes_outputs(tmp_path, capsys):
    code = cli.main(["run", str(ROOT / "scenarios" / "inas_wire.json"), "--out", str(tmp_path)])
    assert code == 0
    assert (tmp_path / "report.json").exists()


def test_cli_table_csv(capsys):
    assert cli.main(["table1", "--format", "csv"]) == 0
    assert capsys.readouterr().out.startswith("# units:")


def test_cli_usage_error_is_config_error(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["bands", "--n-q", "lots"])
    assert exc.value.code == scn.EXIT_CONFIG
    assert json.loads(capsys.readouterr().out)["error"]["type"] == "usage"


def test_cli_bad_quantity(capsys):
    with pytest.raises(SystemExit) as exc:
        cli.main(["bands", "--rabi", "1 parsec", "--delta", "1 ueV", "--a", "100 nm", "--mass", "0.6"])
    assert exc.value.code == scn.EXIT_CONFIG
    err = json.loads(capsys.readouterr().out)["error"]
    assert "--rabi" in err["message"] and "parsec" in err["message"]


def test_cli_case_study(capsys):
    assert cli.main(["case-study", "inas_electron", "--no-interaction"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert all(c["passed"] for c in out["checks"])


def test_cli_stability_pgm(tmp_path, capsys):
    pgm = tmp_path / "d.pgm"
    code = cli.main(["stability-diagram", "--resolution", "5", "4", "--pgm", str(pgm), "--format", "csv"])
    assert code == 0
    assert pgm.read_bytes().startswith(b"P5")
    assert capsys.readouterr().out.startswith("# units:")


def test_t_ratio_sweep_independent_of_threads():
    x, y = [0.05, 0.3, 0.6, 1.0], [1e-3, 1e-2, 1e-1]
    assert scn._t_ratio_sweep(x, y, 1).to_csv() == scn._t_ratio_sweep(x, y, 3).to_csv()
