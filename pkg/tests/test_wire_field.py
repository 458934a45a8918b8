import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special as sp

from maglat import wire_field as wf
from maglat.special import digamma
from maglat.units import MU_0, MU_B_UEV_PER_T


# --- digamma --------------------------------------------------------------

def test_digamma_known_values():
    euler = 0.5772156649015329
    assert digamma(1.0).real == pytest.approx(-euler, rel=1e-14)
    assert digamma(0.5).real == pytest.approx(-euler - 2 * math.log(2), rel=1e-14)


def test_digamma_pole():
    with pytest.raises(ValueError):
        digamma(-2.0)


@settings(max_examples=300, deadline=None)
@given(re=st.floats(-30, 30), im=st.floats(0.01, 30))
def test_digamma_against_scipy(re, im):
    # scipy is a test-only reference; the package carries its own implementation
    z = complex(re, im)
    ref = sp.psi(z)
    assert abs(digamma(z) - ref) <= 1e-12 * max(abs(ref), 1.0)


@settings(max_examples=100, deadline=None)
@given(re=st.floats(-10, 10), im=st.floats(0.05, 10))
def test_digamma_recurrence(re, im):
    z = complex(re, im)
    assert abs(digamma(z + 1) - digamma(z) - 1 / z) <= 1e-12 * max(1.0, abs(1 / z))


# --- field maps -------------------------------------------------------------

def test_single_wire_law():
    g = wf.WireGeometry(1, a=1e-6, d=1e-6, current=2e-3)
    z = np.array([0.3e-6, -1.2e-6, 0.0])
    x = np.array([0.5e-6, 0.2e-6, 2e-6])
    fm = wf.biot_savart_map(g, z, x)
    rho = np.hypot(z, x)
    np.testing.assert_allclose(fm.magnitude, MU_0 * 2e-3 / (2 * np.pi * rho), rtol=1e-14)
    # azimuthal field rotated by 90 degrees in the (z, x) plane: along the radius
    np.testing.assert_allclose(fm.Bz * x - fm.Bx * z, 0, atol=1e-22)


@pytest.mark.parametrize("n_wires", [4, 5])
def test_zero_divergence(n_wires):
    g = wf.WireGeometry(n_wires, a=1.0, d=0.5, current=1.0)
    h = 1e-4
    z0, x0 = 1.3, 0.4
    f = lambda z, x: wf.biot_savart_map(g, np.array([z]), np.array([x]))
    div = ((f(z0, x0 + h).Bx - f(z0, x0 - h).Bx) + (f(z0 + h, x0).Bz - f(z0 - h, x0).Bz)) / (2 * h)
    scale = abs(f(z0, x0).Bx[0]) / h
    assert abs(div[0]) < 1e-6 * scale


@pytest.mark.parametrize("n_wires", [6, 7])
def test_mirror_symmetry_by_parity(n_wires):
    g = wf.WireGeometry(n_wires, a=1.0, d=0.5, current=1.0)
    s = np.linspace(0.05, 2.0, 9)
    left = wf.biot_savart_map(g, g.center - s, np.full_like(s, 0.5))
    right = wf.biot_savart_map(g, g.center + s, np.full_like(s, 0.5))
    sx = 1 if n_wires % 2 else -1
    np.testing.assert_allclose(right.Bx, sx * left.Bx, rtol=1e-12, atol=1e-300)
    np.testing.assert_allclose(right.Bz, -sx * left.Bz, rtol=1e-12, atol=1e-300)


def test_sample_inside_wire_rejected():
    g = wf.WireGeometry(3, a=1e-6, d=1e-6, current=1e-3)
    with pytest.raises(ValueError, match="inside a wire"):
        wf.biot_savart_map(g, np.array([1e-6]), np.array([0.0]))


def test_closed_form_matches_map_units():
    g = wf.WireGeometry(10, a=1e-6, d=1e-6, current=1e-3)
    z = np.linspace(-1, 10, 23) * 1e-6
    x = np.full_like(z, 0.4e-6)
    fm = wf.biot_savart_map(g, z, x)
    unit = MU_0 * 1e-3 / (2 * np.pi * 1e-6)
    c = wf.digamma_field(z / 1e-6, x / 1e-6, 10) * unit
    np.testing.assert_allclose(c.real, fm.Bz, rtol=1e-10, atol=1e-12 * unit)
    np.testing.assert_allclose(c.imag, fm.Bx, rtol=1e-10, atol=1e-12 * unit)


def test_half_infinite_limit():
    z, x = np.array([0.2, 3.3]), np.array([0.5, 0.8])
    far = wf.direct_sum(z, x, 20001)
    np.testing.assert_allclose(wf.digamma_field(z, x, math.inf), far, rtol=1e-4)


# --- series and amplitudes ------------------------------------------------

def test_alternating_partial_sums_bracket_limit():
    val, partial = wf._alternating_sum(lambda n: 1.0 / (n + 1.0))
    assert val == pytest.approx(math.log(2), abs=1e-12)
    over = partial[0::2] - val
    under = partial[1::2] - val
    assert np.all(over > 0) and np.all(under < 0)


def test_series_far_field_vanishes():
    u = np.array([1.0, 4.0, 16.0, 64.0])
    sums = np.array([wf.rabi_series(v) for v in u])
    assert np.all(np.diff(np.abs(sums), axis=0) < 0)
    sx, sz = wf.rabi_series(1e4)
    assert abs(sx) < 1e-4 and abs(sz) < 1e-4
    amps = wf.rabi_amplitudes(20e-6, 1e-6, 1e-3, 2.0)
    assert amps.center_x < 1e-20 and amps.center_z < 1e-20


def test_center_amplitudes_match_long_array():
    a, d, current = 1e-6, 0.7e-6, 1e-3
    g = wf.WireGeometry(201, a, d, current)
    amps = wf.rabi_amplitudes(d, a, current, 2.0)
    gmu = 2.0 * MU_B_UEV_PER_T
    peak_x = wf.biot_savart_map(g, np.array([g.center]), np.array([d])).Bx[0]
    peak_z = wf.biot_savart_map(g, np.array([g.center + a / 2]), np.array([d])).Bz[0]
    assert amps.center_x == pytest.approx(gmu * peak_x, rel=1e-3)
    assert amps.center_z == pytest.approx(gmu * peak_z, rel=1e-3)
    assert amps.series_z == pytest.approx(amps.center_z, rel=1e-10)


def test_sine_fit_exact_input():
    a = 1.0
    z = np.linspace(0, 10, 321)
    fit = wf.fit_sine_profile(z, 2.5 * np.sin(np.pi * z / a + 0.3), a)
    assert fit.amplitude == pytest.approx(2.5, rel=1e-12)
    assert fit.phase == pytest.approx(0.3, abs=1e-12)
    assert fit.central_residual < 1e-12
    with pytest.raises(ValueError):
        wf.fit_sine_profile(np.linspace(0, 10, 12), np.zeros(12), a)


def test_sine_fit_degenerate_zero_row():
    z = np.linspace(0, 10, 321)
    assert wf.fit_sine_profile(z, np.zeros_like(z), 1.0).degenerate


def test_jefimenko():
    assert wf.jefimenko_ratio(1e-6, 0.0).ratio == 0.0
    assert wf.jefimenko_ratio(1e-6, 0.0).warning is None
    assert wf.jefimenko_ratio(1.0, 1e8).warning is not None


def test_geometry_validation_and_feasibility():
    with pytest.raises(ValueError):
        wf.WireGeometry(0, 1e-6, 1e-6, 1e-3)
    g = wf.WireGeometry(5, 1e-6, 1e-6, 1e-3, cross_section=(100e-9, 50e-9))
    assert g.current_density == pytest.approx(2e11)
    assert g.feasible is True
    assert wf.WireGeometry(5, 1e-6, 1e-6, 1.0, cross_section=(100e-9, 50e-9)).feasible is False


def test_report_and_csv():
    g = wf.WireGeometry(10, 1e-6, 1e-6, 1e-3)
    rep, fm = wf.wire_report(g, g_factor=2.0, omega0=100.0)
    assert set(rep) >= {"fit_Bx", "fit_Bz", "rabi", "phase_difference", "jefimenko"}
    assert fm.to_csv().startswith("# units:")
    assert rep["omega0_z_flag"] is False
