import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from maglat import core, units
from maglat.core import DriveSpec, EnvironmentSpec, MaterialSpec

ENERGY = ["J", "eV", "meV", "ueV", "neV", "rad/s", "Hz", "GHz", "2pi*GHz", "K", "mK"]
LENGTH = ["m", "mm", "um", "nm"]


def test_380_ghz_is_250_ueV():
    assert units.convert(380, "GHz", "ueV") == pytest.approx(250.1, abs=0.05)


def test_frequency_with_2pi_prefix():
    assert units.convert(1, "2pi*GHz", "rad/s") == pytest.approx(2 * math.pi * 1e9, rel=1e-15)
    with pytest.raises(units.UnitError):
        units.convert(1, "2pi*m", "m")


def test_identity_conversion_is_exact():
    x = 0.1234567890123
    assert units.convert(x, "ueV", "ueV") == x


def test_incompatible_and_unknown_units():
    with pytest.raises(units.UnitError):
        units.convert(1, "T", "m")
    with pytest.raises(units.UnitError):
        units.convert(1, "furlong", "m")
    with pytest.raises(units.UnitError):
        units.parse_quantity("ten GHz", "ueV")


def test_parse_quantity():
    assert units.parse_quantity("50 mT", "T") == pytest.approx(0.05)
    assert units.parse_quantity(3.5, "T") == 3.5
    assert units.parse_quantity("900 nm", "m") == pytest.approx(9e-7)
    assert units.parse_quantity("-1.5e2 ueV", "meV") == pytest.approx(-0.15)


@settings(max_examples=200, deadline=None)
@given(x=st.floats(1e-6, 1e6), u=st.sampled_from(ENERGY), v=st.sampled_from(ENERGY))
def test_energy_round_trip(x, u, v):
    back = units.convert(units.convert(x, u, v), v, u)
    assert back == pytest.approx(x, rel=1e-12)


@settings(max_examples=100, deadline=None)
@given(x=st.floats(1e-6, 1e6), u=st.sampled_from(LENGTH), v=st.sampled_from(LENGTH))
def test_length_round_trip(x, u, v):
    assert units.convert(units.convert(x, u, v), v, u) == pytest.approx(x, rel=1e-12)


def test_zeeman_zero_cases():
    assert core.zeeman_rabi(0.0, 1.0) == 0.0
    assert core.zeeman_rabi(2.0, 0.0) == 0.0
    with pytest.raises(ValueError):
        core.zeeman_rabi(2.0, -1.0)


def test_zeeman_linear_and_sign_blind():
    assert core.zeeman_rabi(-14.9, 0.02) == pytest.approx(2 * core.zeeman_rabi(14.9, 0.01), rel=1e-14)


def test_recoil_energy_scaling():
    e1 = core.recoil_energy(500e-9, 0.836)
    assert core.recoil_energy(1000e-9, 0.836) == pytest.approx(e1 / 4, rel=1e-14)
    assert core.recoil_energy(500e-9, 2 * 0.836) == pytest.approx(e1 / 2, rel=1e-14)
    # E_R = hbar^2 k^2 / 2m with k = pi/a
    k = math.pi / 500e-9
    assert e1 == pytest.approx(core.hbar2_over_2m(0.836) * k * k, rel=1e-13)


def test_material_invariants():
    with pytest.raises(ValueError):
        MaterialSpec("x", 2.0, 0.0)
    with pytest.raises(ValueError):
        MaterialSpec("x", 2.0, 0.1, dielectric_const=0.5)
    with pytest.raises(ValueError):
        MaterialSpec("x", 2.0, 0.1, phonon_rate=-1)
    with pytest.raises(KeyError):
        core.material("unobtainium")
    assert core.material("InSb_heavy_hole").eff_mass == 0.627


def test_drive_invariants():
    with pytest.raises(ValueError):
        DriveSpec(omega=1.0, detuning=0.0, rabi=1.0, a=0.0)
    with pytest.raises(ValueError):
        DriveSpec(omega=-1.0, detuning=0.0, rabi=1.0, a=1.0)
    with pytest.raises(ValueError):
        DriveSpec(omega=1.0, detuning=0.0, rabi=-1.0, a=1.0)
    static = DriveSpec(omega=0.0, detuning=1e9, rabi=1e9, a=1e-7)
    assert static.omega0 == 1e9


@settings(max_examples=100, deadline=None)
@given(g=st.floats(0.1, 100), b0=st.floats(1e-3, 5), b1=st.floats(1e-4, 0.5), w=st.floats(1e8, 1e12))
def test_drive_fields_round_trip(g, b0, b1, w):
    d = DriveSpec.from_fields(g, b0, b1, w, 1e-7)
    assert d.B0 == pytest.approx(b0, rel=1e-12)
    assert d.B1 == pytest.approx(b1, rel=1e-12)
    assert d.rabi_ueV == pytest.approx(core.zeeman_rabi(g, b1), rel=1e-12)


def test_drive_from_energies_and_profile():
    d = DriveSpec.from_energies(86.0, 1.0, 92.0, 900e-9)
    assert d.rabi_ueV == pytest.approx(86.0, rel=1e-14)
    assert d.k == pytest.approx(math.pi / 900e-9)
    np.testing.assert_allclose(d.profile([0, 450e-9, 900e-9]), [1, 0, -1], atol=1e-15)
    with pytest.raises(ValueError):
        _ = d.B1  # no g-factor


def test_environment():
    with pytest.raises(ValueError):
        EnvironmentSpec(-1.0)
    assert EnvironmentSpec(1.0).thermal_energy == pytest.approx(86.17, rel=1e-3)
