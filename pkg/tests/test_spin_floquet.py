import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.linalg import expm, logm

from maglat import spin_floquet as sf

finite = st.floats(-5, 5, allow_nan=False)


def test_diagonal_case():
    es = sf.adiabatic_eigensystem(0.0, 2.0)
    assert es.epsilon == pytest.approx(1.0)
    assert es.theta == pytest.approx(0.0, abs=1e-15)
    np.testing.assert_allclose(es.plus, sf.UP, atol=1e-15)


def test_pure_sigma_x():
    es = sf.adiabatic_eigensystem(3.0, 0.0)
    assert es.epsilon == pytest.approx(1.5)
    assert es.theta == pytest.approx(math.pi / 2)


def test_symmetric_case():
    es = sf.adiabatic_eigensystem(1.0, 1.0)
    assert es.epsilon == pytest.approx(1 / math.sqrt(2), rel=1e-14)
    assert es.theta == pytest.approx(math.pi / 4, rel=1e-14)


def test_degenerate_point_flagged():
    with pytest.warns(RuntimeWarning, match="eigenbasis undefined"):
        assert sf.adiabatic_eigensystem(0.0, 0.0).degenerate


@pytest.mark.filterwarnings("ignore:Omega = Delta = 0")
@settings(max_examples=200, deadline=None)
@given(rabi=finite, delta=finite)
def test_eigensystem_invariants(rabi, delta):
    es = sf.adiabatic_eigensystem(rabi, delta)
    h = sf.h_rwa(rabi, delta)
    assert es.epsilon >= 0
    scale = max(es.epsilon, 1e-300)
    if es.degenerate:
        return
    assert np.linalg.norm(h @ es.plus - es.epsilon * es.plus) <= 1e-12 * scale
    assert np.linalg.norm(h @ es.minus + es.epsilon * es.minus) <= 1e-12 * scale
    gram = np.array([[np.vdot(u, v) for v in (es.plus, es.minus)] for u in (es.plus, es.minus)])
    np.testing.assert_allclose(gram, np.eye(2), atol=1e-14)


@settings(max_examples=50, deadline=None)
@given(t=st.floats(0, 100), delta=finite, rabi=finite)
def test_full_hamiltonian_hermitian(t, delta, rabi):
    h = sf.full_hamiltonian(t, delta, rabi, 1.0)
    assert np.max(np.abs(h - h.conj().T)) <= 1e-14 * max(np.max(np.abs(h)), 1e-300)


def test_order_zero_is_rwa():
    hf = sf.magnus_hamiltonian(0.3, 0.7, 5.0, order=0)
    np.testing.assert_allclose(hf.matrix(), sf.h_rwa(0.7, 0.3), atol=1e-15)


@pytest.mark.parametrize("order", [0, 1, 2])
def test_no_drive_is_bare_zeeman(order):
    hf = sf.magnus_hamiltonian(0.4, 0.0, 1.0, order=order)
    np.testing.assert_allclose(hf.matrix(), 0.2 * sf.SZ, atol=1e-15)


def test_magnus_matches_log_of_half_period_propagator():
    # [DERIVED] i log U(T/2) / (T/2) from the full propagator, compared order by order
    delta, rabi, omega = 0.2, 0.05, 1.0
    t_half = math.pi / omega
    cols = []
    for psi0 in (sf.UP, sf.DOWN):
        cols.append(sf.propagate_full(delta, rabi, omega, psi0, [t_half], tol=1e-13).psi[0])
    u = np.stack(cols, axis=1)
    h_eff = 1j * logm(u) / t_half
    errs = [np.max(np.abs(sf.magnus_hamiltonian(delta, rabi, omega, o).matrix() - h_eff)) for o in range(3)]
    assert errs[2] < errs[1] < errs[0]
    assert errs[2] < 2e-4


def test_printed_coefficients_are_half_size():
    ex = sf.magnus_hamiltonian(0.2, 0.1, 1.0, 2, "exact")
    pr = sf.magnus_hamiltonian(0.2, 0.1, 1.0, 2, "printed")
    assert (pr.cx - 0.05) == pytest.approx(0.5 * (ex.cx - 0.05), rel=1e-12)
    with pytest.raises(ValueError):
        sf.magnus_hamiltonian(0.2, 0.1, 1.0, 2, "other")


def test_free_evolution_is_phase_rotation():
    times = np.linspace(0, 7, 15)
    psi0 = np.array([1, 1j]) / math.sqrt(2)
    traj = sf.propagate_full(0.6, 0.0, 1.0, psi0, times, tol=1e-12)
    expect = np.stack([psi0[0] * np.exp(-0.3j * times), psi0[1] * np.exp(0.3j * times)], axis=1)
    np.testing.assert_allclose(traj.psi, expect, atol=1e-10)


def test_unitarity():
    tol = 1e-10
    times = np.linspace(0, 40, 200)
    traj = sf.propagate_full(0.3, 0.4, 1.0, sf.DOWN, times, tol=tol)
    assert np.max(np.abs(np.linalg.norm(traj.psi, axis=1) - 1)) < 10 * tol


def test_backward_propagation_reverses():
    psi1 = sf.propagate_full(0.3, 0.4, 1.0, sf.DOWN, [5.0], tol=1e-12).psi[0]
    back = sf.propagate_full(0.3, 0.4, 1.0, psi1, [0.0], tol=1e-12, t0=5.0).psi[0]
    np.testing.assert_allclose(back, sf.DOWN, atol=1e-9)


def test_input_validation():
    with pytest.raises(ValueError):
        sf.propagate_full(0.1, 0.1, 1.0, [1, 1], [1.0])
    with pytest.raises(ValueError):
        sf.propagate_full(0.1, 0.1, 1.0, sf.UP, [1.0], tol=0)


def test_no_drive_error_at_tolerance():
    tol = 1e-11
    for order in (0, 1, 2):
        assert sf.stroboscopic_error(0.2, 0.0, order=order, tol=tol) <= 10 * tol


def test_floquet_propagation_is_exact_exponential():
    hf = sf.magnus_hamiltonian(0.2, 0.1, 1.0, 2)
    t = 3.7
    got = sf.propagate_floquet(hf, sf.DOWN, [t]).psi[0]
    np.testing.assert_allclose(got, expm(-1j * hf.matrix() * t) @ sf.DOWN, atol=1e-13)


def test_trajectory_csv_has_units_line():
    traj = sf.propagate_full(0.2, 0.1, 1.0, sf.DOWN, [0.0, 1.0])
    lines = traj.to_csv().splitlines()
    assert lines[0].startswith("# units:")
    assert len(lines) == 4
