"""Trap depth, motional frequencies, loss estimates and the requirement chain.

Energies are in ueV, lengths in metres, masses in units of m0 unless noted.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .core import DriveSpec, EnvironmentSpec, MaterialSpec, hbar2_over_2m, recoil_energy
from .spin_floquet import adiabatic_eigensystem
from .units import HBAR_UEV_S, MU_B_UEV_PER_T


class FlatTrapError(ValueError):
    """Raised when the potential has no curvature at its minimum."""


class ConvergenceError(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace or []


def epsilon_profile(z, rabi, delta, a):
    """Adiabatic energy 0.5*sqrt(Omega0^2 cos^2(pi z/a) + Delta^2)."""
    return 0.5 * np.hypot(rabi * np.cos(np.pi * np.asarray(z) / a), delta)


def trap_depth(rabi, delta):
    """V0 = (sqrt(Omega0^2 + Delta^2) - |Delta|)/2, the same for both branches."""
    return 0.5 * (np.hypot(rabi, delta) - np.abs(delta))


@dataclass(frozen=True)
class HarmonicFrequency:
    """Motional quanta (ueV) from the curvature of +-epsilon at their minima.

    plus: |+> branch, minimum at the nodes of cos(kz) (infinite for Delta = 0,
    where the minimum is a cusp).  minus: |-> branch, minimum at the
    antinodes.  perturbative: (pi/a) Omega0 / sqrt(2 m |Delta|).
    engineering: the 118 MHz rule of thumb, which depends on g only through
    Omega0.
    """

    plus: float
    minus: float
    perturbative: float
    engineering: float

    @property
    def softer(self) -> float:
        return min(self.plus, self.minus)

    def to_dict(self):
        d = asdict(self)
        d["softer"] = self.softer
        return d


def engineering_omega_ho(rabi, delta, a, m):
    """118e6 rad/s * sqrt((g/2)^2/m) * B1[mT] / (a[um] sqrt(|Delta[GHz]|)).

    With B1 = Omega0/(|g| mu_B) the g-dependence cancels.  Result in ueV.
    """
    if delta == 0:
        return math.inf
    gB1_mT = rabi / MU_B_UEV_PER_T * 1e3  # |g| * B1 in mT
    delta_ghz = abs(delta) / HBAR_UEV_S / 1e9
    w = 118e6 * (0.5 * gB1_mT) / math.sqrt(m) / (a * 1e6 * math.sqrt(delta_ghz))
    return w * HBAR_UEV_S


def harmonic_frequency(rabi, delta, a, m) -> HarmonicFrequency:
    """Curvature-based motional quanta for both sublattices plus the closed forms."""
    if rabi <= 0:
        raise FlatTrapError("Omega0 = 0: the potential is flat")
    k = math.pi / a
    c = hbar2_over_2m(m)  # ueV m^2; hbar^2/m = 2c
    # hbar*w = sqrt(hbar^2 * eps''/m) = sqrt(2 c eps'')
    big = math.hypot(rabi, delta)
    curv_minus = rabi ** 2 * k ** 2 / (2 * big)
    minus = math.sqrt(2 * c * curv_minus)
    if delta == 0:
        plus = math.inf
        pert = math.inf
    else:
        curv_plus = rabi ** 2 * k ** 2 / (2 * abs(delta))
        plus = math.sqrt(2 * c * curv_plus)
        pert = k * rabi * math.sqrt(c / abs(delta))
    return HarmonicFrequency(plus, minus, pert, engineering_omega_ho(rabi, delta, a, m))


def numeric_curvature(rabi, delta, a, branch=+1, h=None):
    """Finite-difference second derivative of branch*epsilon at its minimum (ueV/m^2)."""
    z0 = a / 2 if branch > 0 else 0.0
    h = h or a * 1e-4
    f = lambda z: branch * epsilon_profile(z, rabi, delta, a)
    return (f(z0 + h) - 2 * f(z0) + f(z0 - h)) / h ** 2


def golden_minimum(f, lo, hi, tol=1e-12, max_iter=200):
    """Golden-section search for the minimum of a unimodal f on [lo, hi]."""
    g = (math.sqrt(5) - 1) / 2
    x1, x2 = hi - g * (hi - lo), lo + g * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if abs(hi - lo) < tol * max(1.0, abs(lo) + abs(hi)):
            break
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - g * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + g * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class BoundStates:
    n_b_ratio: float  # V0 / omega_HO
    n_b_sqrt: float   # sqrt(V0 / (4 E_R))


def bound_state_counts(V0, omega_ho, E_R) -> BoundStates:
    if not (V0 > 0 and omega_ho > 0 and E_R > 0):
        raise ValueError("inputs must be positive")
    return BoundStates(V0 / omega_ho, math.sqrt(V0 / (4 * E_R)))


def majorana_loss(chi):
    """eta = 2 pi exp(-4/chi)."""
    chi = np.asarray(chi, dtype=float)
    if np.any(chi <= 0):
        raise ValueError("chi must be positive")
    out = 2 * np.pi * np.exp(-4.0 / chi)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True)
class ChainLink:
    """One inequality lhs << rhs (or lhs <~ rhs) of the requirement chain."""

    name: str
    lhs: float
    rhs: float
    kind: str  # "<<" or "<~"
    threshold: float

    @property
    def ratio(self) -> float:
        if self.lhs == 0:
            return 0.0
        return self.lhs / self.rhs if self.rhs > 0 else math.inf

    @property
    def margin(self) -> float:
        """threshold / ratio: > 1 means satisfied with room to spare."""
        r = self.ratio
        return math.inf if r == 0 else self.threshold / r

    @property
    def passed(self) -> bool:
        return self.ratio <= self.threshold

    def to_dict(self):
        return {"name": self.name, "kind": self.kind, "lhs": self.lhs, "rhs": self.rhs,
                "ratio": self.ratio, "threshold": self.threshold, "margin": self.margin,
                "passed": self.passed}


@dataclass(frozen=True)
class Thresholds:
    much_less: float = 0.1
    less_approx: float = 1.0


@dataclass
class TrapReport:
    V0: float
    omega_ho: float
    harmonic: HarmonicFrequency
    E_R: float
    n_b_ratio: float
    n_b_sqrt: float
    chi: float
    eta_loss: float
    eps_ad: float
    rabi: float
    detuning: float
    omega: float
    thermal_energy: float
    chain: list = field(default_factory=list)

    @property
    def verdict(self) -> bool:
        return all(link.passed for link in self.chain)

    def link(self, name) -> ChainLink:
        for l in self.chain:
            if l.name == name:
                return l
        raise KeyError(name)

    def to_dict(self):
        return {
            "V0": self.V0, "omega_ho": self.omega_ho, "harmonic": self.harmonic.to_dict(),
            "E_R": self.E_R, "n_b_ratio": self.n_b_ratio, "n_b_sqrt": self.n_b_sqrt,
            "chi": self.chi, "eta_loss": self.eta_loss, "eps_ad": self.eps_ad,
            "rabi": self.rabi, "detuning": self.detuning, "omega": self.omega,
            "thermal_energy": self.thermal_energy,
            "chain": [l.to_dict() for l in self.chain], "verdict": self.verdict,
        }


def check_requirements(material: MaterialSpec, drive: DriveSpec, environment: EnvironmentSpec,
                       thresholds: Thresholds = Thresholds()) -> TrapReport:
    """Evaluate every derived trap quantity and the requirement chain.

    gamma, kT << omega_HO <~ V0 <~ Omega0/2 <~ omega/2, plus Gamma << |Delta|.
    omega_HO is the softer of the two sublattice curvatures.
    """
    if material is None or drive is None or environment is None:
        raise ValueError("material, drive and environment are all required")
    rabi, delta, omega = drive.rabi_ueV, drive.detuning_ueV, drive.omega_ueV
    V0 = float(trap_depth(rabi, delta))
    hf = harmonic_frequency(rabi, delta, drive.a, material.eff_mass)
    w_ho = hf.softer
    E_R = recoil_energy(drive.a, material.eff_mass)
    nb = bound_state_counts(V0, w_ho, E_R)
    chi = w_ho / abs(delta) if delta != 0 else math.inf
    eta = majorana_loss(chi) if math.isfinite(chi) else 2 * math.pi
    kT = environment.thermal_energy
    ml, la = thresholds.much_less, thresholds.less_approx
    chain = [
        ChainLink("gamma_ph << omega_HO", material.phonon_rate, w_ho, "<<", ml),
        ChainLink("kT << omega_HO", kT, w_ho, "<<", ml),
        ChainLink("kT << V0", kT, V0, "<<", ml),
        ChainLink("omega_HO <~ V0", w_ho, V0, "<~", la),
        ChainLink("V0 <~ Omega0/2", V0, rabi / 2, "<~", la),
        ChainLink("Omega0/2 <~ omega/2", rabi / 2, omega / 2, "<~", la),
        ChainLink("Gamma << |Delta|", material.linewidth, abs(delta), "<<", ml),
    ]
    return TrapReport(V0=V0, omega_ho=w_ho, harmonic=hf, E_R=E_R, n_b_ratio=nb.n_b_ratio,
                      n_b_sqrt=nb.n_b_sqrt, chi=chi, eta_loss=eta,
                      eps_ad=V0 / omega if omega > 0 else math.inf,
                      rabi=rabi, detuning=delta, omega=omega, thermal_energy=kT, chain=chain)


# --- adiabatic vs spinor grid diagonalisation -------------------------------

@dataclass
class SpectrumComparison:
    adiabatic_plus: np.ndarray
    adiabatic_minus: np.ndarray
    exact_plus: np.ndarray
    exact_minus: np.ndarray
    V0: float
    n_points: int

    @property
    def deviation_plus(self):
        return np.abs(self.exact_plus - self.adiabatic_plus) / self._scale

    @property
    def deviation_minus(self):
        return np.abs(self.exact_minus - self.adiabatic_minus) / self._scale

    @property
    def _scale(self):
        return self.V0 if self.V0 > 0 else 1.0

    @property
    def max_deviation(self) -> float:
        return float(max(self.deviation_plus.max(), self.deviation_minus.max()))


def _kinetic_matrix(n, length, c):
    """Spectral (plane-wave exact) kinetic matrix c * p^2 on a periodic grid."""
    kvec = 2 * np.pi * np.fft.fftfreq(n, d=length / n)
    f = np.fft.fft(np.eye(n), axis=0)
    return (np.fft.ifft(c * kvec[:, None] ** 2 * f, axis=0)).real


def _spectra(rabi, delta, a, m, n_periods, ppp, n_levels):
    n = n_periods * ppp
    length = n_periods * a
    z = np.arange(n) * (length / n)
    c = hbar2_over_2m(m)
    T = _kinetic_matrix(n, length, c)
    eps = epsilon_profile(z, rabi, delta, a)
    ad_p = np.linalg.eigvalsh(T + np.diag(eps))[:n_levels]
    ad_m = np.linalg.eigvalsh(T - np.diag(eps))[:n_levels]
    om = rabi * np.cos(np.pi * z / a)
    H = np.zeros((2 * n, 2 * n))
    H[:n, :n] = T + np.diag(0.5 * delta * np.ones(n))
    H[n:, n:] = T - np.diag(0.5 * delta * np.ones(n))
    H[:n, n:] = np.diag(0.5 * om)
    H[n:, :n] = np.diag(0.5 * om)
    w, v = np.linalg.eigh(H)
    es = adiabatic_eigensystem(om, delta * np.ones(n))
    # weight of each eigenvector on the local |+> state
    plus = es.plus.real
    amp = plus[:, 0][:, None] * v[:n] + plus[:, 1][:, None] * v[n:]
    wplus = np.sum(amp ** 2, axis=0)
    ex_p = w[wplus > 0.5][:n_levels]
    ex_m = w[wplus <= 0.5][:n_levels]
    return ad_p, ad_m, ex_p, ex_m


def spectrum_comparison(rabi, delta, a, m, n_periods=4, points_per_period=None, n_levels=3,
                        conv_tol=1e-8, max_points_per_period=512) -> SpectrumComparison:
    """Adiabatic (p^2/2m +- eps) versus full spinor spectra on the same periodic grid.

    The grid is refined until the lowest levels change by less than ``conv_tol``
    (relative to V0) on doubling; deviations are reported relative to V0.
    """
    if n_periods < 4:
        raise ValueError("need at least 4 lattice periods")
    if delta == 0 and rabi > 0:
        raise ValueError("Delta = 0 gives a cusp in the |+> branch; choose Delta != 0")
    V0 = float(trap_depth(rabi, delta))
    scale = V0 if V0 > 0 else max(abs(delta), 1.0)
    if points_per_period is None:
        points_per_period = 16
        if rabi > 0:
            hf = harmonic_frequency(rabi, delta, a, m)
            ell = math.sqrt(2 * hbar2_over_2m(m) / max(hf.plus, hf.minus))
            points_per_period = max(16, int(2 ** math.ceil(math.log2(16 * a / ell))))
    ppp = points_per_period
    trace = []
    prev = _spectra(rabi, delta, a, m, n_periods, ppp, n_levels)
    while True:
        if ppp * 2 > max_points_per_period:
            raise ConvergenceError("spectrum not converged at maximum grid", trace)
        cur = _spectra(rabi, delta, a, m, n_periods, ppp * 2, n_levels)
        change = max(float(np.max(np.abs(x - y))) for x, y in zip(prev, cur)) / scale
        trace.append((ppp * 2, change))
        ppp *= 2
        prev = cur
        if change < conv_tol:
            break
    return SpectrumComparison(*prev, V0=V0, n_points=ppp * n_periods)
