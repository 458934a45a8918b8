import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.special import mathieu_a, mathieu_b

from maglat import stability as sb


def _q0_reference(r, eta):
    # slow time s = eta tau: y'' + (A - 2 Q cos 2s) y = 0, A = r/eta^2, Q = r/(2 eta^2)
    A, Q = r / eta ** 2, r / (2 * eta ** 2)
    n = 0
    while True:
        if A < mathieu_a(n, Q):
            return False
        if A <= mathieu_b(n + 1, Q):
            return True
        n += 1


def test_param_validation():
    with pytest.raises(ValueError):
        sb.StabilityParams(-0.1, 0.0, 0.1)
    with pytest.raises(ValueError):
        sb.StabilityParams(0.1, 0.0, 0.0)


def test_derived_params():
    args = dict(v_saw=10.0, m=0.627, omega=2 * math.pi * 1e9, k=math.pi / 100e-9)
    assert sb.derive_params(0.0, 25.0, **args).r == 0.0
    p1 = sb.derive_params(30.0, 25.0, **args)
    p2 = sb.derive_params(30.0 * math.sqrt(2), 50.0, **args)
    assert p2.r == pytest.approx(p1.r, rel=1e-14)
    with pytest.raises(ValueError, match="finite detuning"):
        sb.derive_params(30.0, 0.0, **args)


def test_common_period():
    assert sb.common_period(sb.StabilityParams(0.2, 0.0, 0.37)) == pytest.approx(math.pi)
    assert sb.common_period(sb.StabilityParams(0.2, 0.1, 0.25)) == pytest.approx(4 * math.pi)
    assert sb.common_period(sb.StabilityParams(0.2, 0.1, 1 / math.sqrt(2))) is None


def test_free_motion_marginal():
    M = sb.monodromy(0.0, 0.0, 0.1)
    np.testing.assert_allclose(M[0], [[1, math.pi], [0, 1]], atol=1e-10)
    pt = sb.classify(0.0, 0.0, 0.1)
    assert pt.stable and pt.growth == pytest.approx(1.0, abs=1e-8)


def test_determinant_unit_even_when_strongly_unstable():
    pts = sb.classify_many(np.array([0.1, 0.9, 1.2]), np.array([0.05, 0.4, 0.5]), 0.1)
    assert max(abs(p.determinant - 1) for p in pts) < 1e-8
    assert pts[-1].growth > 1e6


@settings(max_examples=30, deadline=None)
@given(q=st.floats(0.01, 2.0))
def test_r0_matches_mathieu_chart(q):
    # z'' + 2 q cos(2 tau) z = 0 is Mathieu with a = 0 and parameter -q
    lo, hi = mathieu_a(0, q), mathieu_b(1, q)
    margin = min(abs(lo), abs(hi))
    if margin < 1e-3:
        return
    assert sb.classify(q, 0.0, 0.1).stable == (lo <= 0 <= hi)


@pytest.mark.parametrize("r", [0.001, 0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.3])
def test_q0_column_matches_slow_time_mathieu(r):
    # [DERIVED] change of variables to slow time
    assert sb.classify(0.0, r, 0.1).stable == _q0_reference(r, 0.1)
    assert sb.mathieu_q0_oracle(r, 0.1) == _q0_reference(r, 0.1)


def test_lyapunov_agrees_with_monodromy():
    q = np.array([0.2, 0.5, 1.0, 0.3])
    r = np.array([0.1, 0.2, 0.3, 0.0])
    mono = sb.classify_many(q, r, 0.1, method="monodromy")
    lyap = sb.classify_many(q, r, 0.1, method="lyapunov", tau_max=3e3)
    assert [p.stable for p in mono] == [p.stable for p in lyap]


def test_irrational_eta_falls_back_to_lyapunov():
    pt = sb.classify(1.2, 0.1, 1 / math.sqrt(2), tau_max=2e3)
    assert pt.method == "lyapunov"
    with pytest.raises(ValueError):
        sb.classify(0.2, 0.1, 1 / math.sqrt(2), method="monodromy")


def test_boundary_bracket_validation():
    with pytest.raises(ValueError):
        sb.boundary_q(lo=1.0, hi=1.2)


def test_diagram_refinement_stable_away_from_boundary():
    # [DERIVED] verdicts on the coarse grid reappear at the same points of the doubled grid
    coarse = sb.diagram((0.0, 1.2), (0.0, 0.4), resolution=(7, 5))
    fine = sb.diagram((0.0, 1.2), (0.0, 0.4), resolution=(13, 9))
    sub = fine.stable[::2, ::2]
    changed = np.mean(sub != coarse.stable)
    assert changed < 0.01
    assert 0 < coarse.stable_fraction() < 1


def test_diagram_outputs():
    d = sb.diagram((0.0, 1.0), (0.0, 0.2), resolution=(4, 3))
    csv = d.to_csv().splitlines()
    assert csv[0].startswith("# units:")
    assert len(csv) == 2 + 12
    pgm = d.to_pgm()
    assert pgm.startswith(b"P5")
    with pytest.raises(ValueError):
        sb.diagram((0.0, math.inf), (0.0, 0.2))


def test_free_flight_without_fields():
    traj = sb.integrate_mean_field(sb.StabilityParams(0.0, 0.0, 0.1), 0.0, sb.MeanFieldState(0.2, 0.03), 50.0)
    np.testing.assert_allclose(traj.y[0], 0.2 + 0.03 * traj.tau, atol=1e-10)


def test_spin_norm_conserved():
    traj = sb.integrate_mean_field(sb.StabilityParams(0.3, 0.2, 0.1), 0.05, sb.MeanFieldState(0.1, 0.0), 1e3)
    assert traj.spin_norm_drift < 1e-9
    assert traj.to_csv().startswith("# units:")


def test_mean_field_state_validation():
    with pytest.raises(ValueError):
        sb.MeanFieldState(0.0, 0.0, sx=1.0, sy=0.0, sz=1.0)


def test_mean_field_follows_reduced_equation():
    q = np.array([0.2, 0.3, 0.6])
    r = np.array([0.1, 0.2, 0.3])
    mono = [p.stable for p in sb.classify_many(q, r, 0.1)]
    mf = sb.mean_field_verdicts(q, r, 0.1, kappa=0.01)
    assert list(mf) == mono
