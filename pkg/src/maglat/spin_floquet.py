"""Two-level spin dynamics under an AC Stark drive.

Everything here works in units with hbar = 1: Delta, Omega and omega share a
single (arbitrary) frequency unit and times are in its inverse.
"""

from __future__ import annotations

import io
import warnings
from dataclasses import dataclass

import numpy as np
from scipy.integrate import solve_ivp

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
SPLUS = np.array([[0, 1], [0, 0]], dtype=complex)   # |up><down|
SMINUS = np.array([[0, 0], [1, 0]], dtype=complex)  # |down><up|

UP = np.array([1, 0], dtype=complex)
DOWN = np.array([0, 1], dtype=complex)


class PropagationError(RuntimeError):
    """Raised when the adaptive integrator cannot reach the requested tolerance."""


def h_rwa(rabi, delta):
    """Time-independent RWA Hamiltonian (Delta/2) sz + (Omega/2) sx."""
    return 0.5 * delta * SZ + 0.5 * rabi * SX


@dataclass
class AdiabaticEigensystem:
    epsilon: np.ndarray
    theta: np.ndarray
    plus: np.ndarray   # shape (..., 2)
    minus: np.ndarray
    degenerate: np.ndarray


def adiabatic_eigensystem(rabi, delta) -> AdiabaticEigensystem:
    """Local eigenpairs of h_RWA, h|+-> = +-epsilon|+->.

    theta = atan2(Omega, Delta), which equals arcsin(Omega/sqrt(Omega^2+Delta^2))
    for Delta > 0 and stays continuous when Omega changes sign.
    """
    rabi = np.asarray(rabi, dtype=float)
    delta = np.asarray(delta, dtype=float)
    rabi, delta = np.broadcast_arrays(rabi, delta)
    eps = 0.5 * np.hypot(rabi, delta)
    degenerate = eps == 0
    if np.any(degenerate):
        warnings.warn("Omega = Delta = 0: eigenbasis undefined, theta set to 0", RuntimeWarning, stacklevel=2)
    theta = np.where(degenerate, 0.0, np.arctan2(rabi, delta))
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    plus = np.stack([c, s], axis=-1).astype(complex)
    minus = np.stack([-s, c], axis=-1).astype(complex)
    return AdiabaticEigensystem(eps, theta, plus, minus, degenerate)


@dataclass
class FloquetHamiltonian:
    """Stroboscopic Hamiltonian cx*sx + cz*sz truncated at ``order``."""

    order: int
    cx: np.ndarray
    cz: np.ndarray
    omega: float

    def matrix(self):
        cx = np.asarray(self.cx)
        cz = np.asarray(self.cz)
        return cx[..., None, None] * SX + cz[..., None, None] * SZ

    @property
    def period(self) -> float:
        return 2 * np.pi / self.omega


# Second-order Magnus coefficients.  "exact" reproduces log(U(T/2)) of the
# full rotating-frame propagator; "printed" halves the order-1 and order-2
# corrections (the alternative normalisation found in the literature).
_MAGNUS_SCALE = {"exact": 1.0, "printed": 0.5}


def magnus_hamiltonian(delta, rabi, omega, order=2, coefficients="exact") -> FloquetHamiltonian:
    """Stroboscopic Floquet Hamiltonian up to ``order`` in 1/omega.

    H0 = (Delta/2) sz + (Omega/2) sx
    H1 = Omega/(8 omega) (2 Delta sx - Omega sz)
    H2 = -Omega/(32 omega^2) (4 Delta^2 + Omega^2) sx
    Pass ``coefficients="printed"`` for the 1/16, 1/64 normalisation.
    """
    if not omega > 0:
        raise ValueError("omega must be positive")
    if order not in (0, 1, 2):
        raise ValueError("order must be 0, 1 or 2")
    try:
        s = _MAGNUS_SCALE[coefficients]
    except KeyError:
        raise ValueError(f"coefficients must be one of {sorted(_MAGNUS_SCALE)}") from None
    delta = np.asarray(delta, dtype=float)
    rabi = np.asarray(rabi, dtype=float)
    cx = 0.5 * rabi + 0.0 * delta
    cz = 0.5 * delta + 0.0 * rabi
    if order >= 1:
        cx = cx + s * rabi * 2 * delta / (8 * omega)
        cz = cz - s * rabi ** 2 / (8 * omega)
    if order >= 2:
        cx = cx - s * rabi * (4 * delta ** 2 + rabi ** 2) / (32 * omega ** 2)
    return FloquetHamiltonian(order, cx, cz, float(omega))


def full_hamiltonian(t, delta, rabi, omega):
    """Rotating-frame Hamiltonian including counter-rotating terms."""
    ph = np.exp(2j * omega * t)
    return 0.5 * delta * SZ + 0.5 * rabi * SX + 0.5 * rabi * (SPLUS * ph + SMINUS * np.conj(ph))


@dataclass
class Trajectory:
    t: np.ndarray
    psi: np.ndarray  # shape (n_t, 2)

    @property
    def populations(self):
        return np.abs(self.psi) ** 2

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# units: t in 1/[frequency unit]; amplitudes dimensionless\n")
        buf.write("t,re_up,im_up,re_down,im_down,p_up,p_down\n")
        pops = self.populations
        for t, a, p in zip(self.t, self.psi, pops):
            buf.write(f"{t:.12g},{a[0].real:.12g},{a[0].imag:.12g},{a[1].real:.12g},"
                      f"{a[1].imag:.12g},{p[0]:.12g},{p[1]:.12g}\n")
        return buf.getvalue()


def stroboscopic_times(omega, n_periods):
    """t_n = n T/2 with T = 2 pi/omega, for n = 0 .. 2 n_periods."""
    return np.arange(2 * n_periods + 1) * np.pi / omega


def propagate_full(delta, rabi, omega, psi0, times, tol=1e-10, t0=0.0) -> Trajectory:
    """Integrate i dpsi/dt = H(t) psi with an adaptive 8th-order scheme.

    ``times`` may lie before ``t0`` (backward propagation).
    """
    psi0 = np.asarray(psi0, dtype=complex)
    if abs(np.linalg.norm(psi0) - 1) > 1e-12:
        raise ValueError("psi0 must be normalised")
    if not tol > 0:
        raise ValueError("tol must be positive")
    times = np.atleast_1d(np.asarray(times, dtype=float))
    t_end = times[np.argmax(np.abs(times - t0))]
    if t_end == t0:
        return Trajectory(times, np.tile(psi0, (len(times), 1)))

    def rhs(t, y):
        psi = y[:2] + 1j * y[2:]
        d = -1j * (full_hamiltonian(t, delta, rabi, omega) @ psi)
        return np.concatenate([d.real, d.imag])

    y0 = np.concatenate([psi0.real, psi0.imag])
    sol = solve_ivp(rhs, (t0, t_end), y0, method="DOP853", rtol=tol, atol=tol * 1e-2,
                    dense_output=True)
    if not sol.success:
        raise PropagationError(f"integration failed at tol={tol}: {sol.message}")
    y = sol.sol(times)
    psi = (y[:2] + 1j * y[2:]).T
    return Trajectory(times, psi)


def propagate_floquet(hf: FloquetHamiltonian, psi0, times) -> Trajectory:
    """Evolve psi0 under the constant stroboscopic Hamiltonian."""
    h = hf.matrix()
    w, v = np.linalg.eigh(h)
    c = v.conj().T @ np.asarray(psi0, dtype=complex)
    times = np.asarray(times, dtype=float)
    psi = (v @ (np.exp(-1j * np.outer(w, times)) * c[:, None])).T
    return Trajectory(times, psi)


def stroboscopic_error(delta_over_omega, rabi_over_omega, order=2, n_periods=10,
                       coefficients="exact", tol=1e-11, psi0=DOWN) -> float:
    """Max Euclidean distance between full and Magnus-propagated states at t_n."""
    if n_periods < 1:
        raise ValueError("n_periods must be >= 1")
    omega = 1.0
    times = stroboscopic_times(omega, n_periods)
    full = propagate_full(delta_over_omega, rabi_over_omega, omega, psi0, times, tol=tol)
    hf = magnus_hamiltonian(delta_over_omega, rabi_over_omega, omega, order, coefficients)
    approx = propagate_floquet(hf, psi0, times)
    return float(np.max(np.linalg.norm(full.psi - approx.psi, axis=1)))


def floquet_comparison(delta_over_omega, rabi_over_omega, n_periods=10, samples_per_period=40,
                       order=2, coefficients="exact", tol=1e-11):
    """Dense full trajectory plus the stroboscopic Magnus prediction."""
    omega = 1.0
    t = np.linspace(0, n_periods * 2 * np.pi, n_periods * samples_per_period + 1)
    full = propagate_full(delta_over_omega, rabi_over_omega, omega, DOWN, t, tol=tol)
    hf = magnus_hamiltonian(delta_over_omega, rabi_over_omega, omega, order, coefficients)
    ts = stroboscopic_times(omega, n_periods)
    return full, propagate_floquet(hf, DOWN, ts)
