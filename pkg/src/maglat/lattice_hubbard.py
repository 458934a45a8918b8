"""Bloch bands, Wannier functions and Hubbard parameters of the spin lattice.

Internally lengths are in units of the lattice constant a and energies in
units of the recoil energy E_R = hbar^2 k^2 / 2m with k = pi/a.  A plane wave
exp(i pi (q + 2n) z) then has kinetic energy (q + 2n)^2 and the quasimomentum
q (in units of k) runs over [-1, 1).
"""

from __future__ import annotations

import io
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.integrate import quad
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .trap_design import trap_depth
from .units import E_CHARGE, EPS_0, HBAR_UEV_S, UEV


class BandConvergenceError(RuntimeError):
    pass


class BandCrossingError(RuntimeError):
    pass


# --- periodic potentials --------------------------------------------------

@dataclass(frozen=True)
class LatticePotential:
    """Fourier series V(z) = sum_m V_m exp(2 pi i m z), z in units of a (E_R units)."""

    coeffs: np.ndarray  # index m + M for m = -M..M

    @property
    def order(self) -> int:
        return (len(self.coeffs) - 1) // 2

    def component(self, m: int) -> complex:
        M = self.order
        return self.coeffs[m + M] if abs(m) <= M else 0.0

    def __call__(self, z):
        z = np.asarray(z, dtype=float)
        m = np.arange(-self.order, self.order + 1)
        return np.real(np.exp(2j * np.pi * np.multiply.outer(z, m)) @ self.coeffs)

    @classmethod
    def from_function(cls, f, n_samples=1024, rel_tol=1e-15) -> "LatticePotential":
        """Sample one period and keep Fourier components above ``rel_tol``."""
        z = np.arange(n_samples) / n_samples
        c = np.fft.fft(f(z)) / n_samples
        half = n_samples // 2
        m = np.fft.fftfreq(n_samples, 1.0 / n_samples).astype(int)
        mag = np.abs(c)
        keep = mag > rel_tol * max(mag.max(), 1e-300)
        keep[0] = True
        M = int(np.max(np.abs(m[keep])))
        M = min(M, half - 1)
        coeffs = np.zeros(2 * M + 1, dtype=complex)
        for mm in range(-M, M + 1):
            coeffs[mm + M] = c[mm % n_samples]
        return cls(coeffs)

    @classmethod
    def zero(cls) -> "LatticePotential":
        return cls(np.zeros(1, dtype=complex))

    @classmethod
    def sin2(cls, V0: float) -> "LatticePotential":
        """V0 sin^2(pi z) = V0/2 - V0/4 (e^{2 pi i z} + e^{-2 pi i z})."""
        return cls(np.array([-V0 / 4, V0 / 2, -V0 / 4], dtype=complex))


def adiabatic_potential(rabi, delta, branch, e_r=1.0, centered=True) -> LatticePotential:
    """branch * eps(z) / E_R with eps = sqrt(Omega0^2 cos^2(pi z) + Delta^2) / 2.

    The constant offset branch*|Delta|/2 is removed when ``centered``.
    """
    offset = 0.5 * abs(delta) if centered else 0.0

    def f(z):
        return branch * (0.5 * np.hypot(rabi * np.cos(np.pi * z), delta) - offset) / e_r

    return LatticePotential.from_function(f)


# --- band structure ------------------------------------------------------

@dataclass
class BandSolution:
    q: np.ndarray          # (n_q,) in units of k
    energies: np.ndarray   # (n_q, n_bands) in E_R
    vectors: np.ndarray    # (n_q, n_pw, n_bands)
    cutoff: int            # plane waves n = -cutoff..cutoff
    potential: LatticePotential

    @property
    def n_q(self) -> int:
        return len(self.q)

    def bandwidth(self, band=0) -> float:
        e = self.energies[:, band]
        return float(e.max() - e.min())

    def gap(self, band=0) -> float:
        return float(self.energies[:, band + 1].min() - self.energies[:, band].max())

    def to_csv(self, e_r=1.0) -> str:
        buf = io.StringIO()
        buf.write("# units: q in pi/a; E in ueV\n" if e_r != 1.0 else "# units: q in pi/a; E in E_R\n")
        cols = ",".join(f"E{n}" for n in range(self.energies.shape[1]))
        buf.write(f"q,{cols}\n")
        for q, row in zip(self.q, self.energies):
            buf.write(f"{q:.12g}," + ",".join(f"{e * e_r:.12g}" for e in row) + "\n")
        return buf.getvalue()


def quasimomenta(n_q: int) -> np.ndarray:
    return -1.0 + 2.0 * np.arange(n_q) / n_q


def _central_matrices(potential: LatticePotential, q, cutoff):
    n = np.arange(-cutoff, cutoff + 1)
    diff = n[:, None] - n[None, :]
    M = potential.order
    V = np.zeros(diff.shape, dtype=complex)
    mask = np.abs(diff) <= M
    V[mask] = potential.coeffs[diff[mask] + M]
    kin = (q[:, None] + 2 * n[None, :]) ** 2
    H = np.broadcast_to(V, (len(q),) + V.shape).copy()
    idx = np.arange(len(n))
    H[:, idx, idx] += kin
    return H


def _solve(potential, q, cutoff, n_bands):
    w, v = np.linalg.eigh(_central_matrices(potential, q, cutoff))
    return w[:, :n_bands], v[:, :, :n_bands]


def band_structure(potential: LatticePotential, n_q=32, n_bands=4, cutoff=16, max_cutoff=512,
                   rel_tol=1e-8) -> BandSolution:
    """Diagonalise the central equation on a uniform BZ grid.

    The plane-wave cutoff is doubled until the lowest ``n_bands`` energies
    change by less than ``rel_tol`` (relative to max(|E|, 1 E_R)).
    """
    if cutoff < 16:
        raise ValueError("cutoff must be >= 16")
    q = quasimomenta(n_q)
    e_prev, v_prev = _solve(potential, q, cutoff, n_bands)
    while True:
        nc = 2 * cutoff
        if nc > max_cutoff:
            raise BandConvergenceError(f"bands not converged at cutoff {cutoff}")
        e, v = _solve(potential, q, nc, n_bands)
        change = np.max(np.abs(e - e_prev) / np.maximum(np.abs(e), 1.0))
        if change < rel_tol:
            # keep the cheaper basis; it already meets the tolerance
            return BandSolution(q, e_prev, v_prev, cutoff, potential)
        cutoff, e_prev, v_prev = nc, e, v


# --- hopping ---------------------------------------------------------------

def tc_analytic(V0, E_R):
    """t_c / E_R = (4/sqrt(pi)) s^{3/4} exp(-2 sqrt(s)), s = V0/E_R; returns t_c in E_R's unit."""
    s = np.asarray(V0, dtype=float) / E_R
    return E_R * 4 / math.sqrt(math.pi) * s ** 0.75 * np.exp(-2 * np.sqrt(s))


def tc_numeric(bands: BandSolution, band=0) -> float:
    """t_c = -(1/N) sum_q E(q) exp(i q a) from the lowest band (E_R units)."""
    e = bands.energies[:, band]
    return float(-np.real(np.mean(e * np.exp(1j * np.pi * bands.q))))


@dataclass(frozen=True)
class DispersionFit:
    center: float
    t: float
    max_residual: float  # relative to the bandwidth


def fit_dispersion(bands: BandSolution, band=0) -> DispersionFit:
    """Least-squares E(q) = e - 2 t cos(q a)."""
    e = bands.energies[:, band]
    A = np.stack([np.ones_like(bands.q), -2 * np.cos(np.pi * bands.q)], axis=-1)
    (c, t), *_ = np.linalg.lstsq(A, e, rcond=None)
    res = np.max(np.abs(A @ np.array([c, t]) - e)) / bands.bandwidth(band)
    return DispersionFit(float(c), float(t), float(res))


# --- Wannier functions -----------------------------------------------------

@dataclass
class WannierSet:
    """Real Wannier function w0 on a periodic supercell of ``n_cells`` periods.

    z is in units of a; site(j) is w0 translated by j lattice constants.
    """

    z: np.ndarray
    w0: np.ndarray
    points_per_period: int
    n_cells: int
    site0: float
    bands: BandSolution
    band: int = 0

    @property
    def dz(self) -> float:
        return 1.0 / self.points_per_period

    def site(self, j: int) -> np.ndarray:
        return np.roll(self.w0, j * self.points_per_period)

    def overlap_matrix(self, sites=range(-2, 3)) -> np.ndarray:
        ws = np.array([self.site(j) for j in sites])
        return ws @ ws.T * self.dz

    def norm(self) -> float:
        return float(np.sum(self.w0 ** 2) * self.dz)

    def kinetic(self, f):
        """Apply (p/pi)^2 spectrally (E_R units)."""
        n = len(self.z)
        kk = 2 * np.pi * np.fft.fftfreq(n, d=self.dz)
        return np.real(np.fft.ifft((kk / np.pi) ** 2 * np.fft.fft(f)))

    def hamiltonian_element(self, i: int, j: int) -> float:
        wi, wj = self.site(i), self.site(j)
        hw = self.kinetic(wj) + self.bands.potential(self.z) * wj
        return float(np.sum(wi * hw) * self.dz)

    def refined(self, factor: int) -> tuple[np.ndarray, np.ndarray]:
        """Band-limited (Fourier) interpolation of w0 onto a finer grid."""
        n = len(self.w0)
        c = np.fft.fft(self.w0)
        nn = n * factor
        cp = np.zeros(nn, dtype=complex)
        h = n // 2
        cp[:h] = c[:h]
        cp[-h:] = c[-h:]
        w = np.real(np.fft.ifft(cp)) * factor
        z = self.z[0] + np.arange(nn) * (self.dz / factor)
        return z, w


def _parallel_transport(vectors, cutoff):
    """Smooth, periodic gauge along the q grid for a single band."""
    c = vectors.copy()
    n_q = c.shape[0]
    for j in range(1, n_q):
        ov = np.vdot(c[j - 1], c[j])
        c[j] *= np.exp(-1j * np.angle(ov))
    # closing overlap: state at q_0 + 2 has coefficients shifted by one
    shifted = np.zeros_like(c[0])
    shifted[:-1] = c[0][1:]
    phi = np.angle(np.vdot(c[-1], shifted))
    c *= np.exp(1j * phi * np.arange(n_q) / n_q)[:, None]
    return c


def wannier_functions(bands: BandSolution, band=0, site0=0.0, points_per_period=None,
                      min_gap_ratio=1.0) -> WannierSet:
    """Maximally localised (parallel-transport) Wannier function of one band.

    In 1D this coincides with the eigenvectors of the band-projected position
    operator.  The function is made real with a positive value at its centre
    and placed at the site nearest ``site0`` (units of a) close to the middle of
    the supercell.  The band counts as isolated when gap > min_gap_ratio * width.
    """
    if band + 1 < bands.energies.shape[1]:
        if bands.gap(band) <= min_gap_ratio * bands.bandwidth(band):
            raise BandCrossingError(
                f"band {band} not isolated: gap {bands.gap(band):.3g} <= width {bands.bandwidth(band):.3g}")
    n_q = bands.n_q
    if n_q < 8:
        raise ValueError("need at least 8 quasimomenta (supercell of >= 8 periods)")
    n_pw = 2 * bands.cutoff + 1
    P = points_per_period or max(64, 1 << int(math.ceil(math.log2(2 * n_pw + 2))))
    c = _parallel_transport(bands.vectors[:, :, band], bands.cutoff)
    L = n_q
    z = -L / 2 + np.arange(L * P) / P
    n = np.arange(-bands.cutoff, bands.cutoff + 1)
    w = np.zeros(len(z), dtype=complex)
    for j, q in enumerate(bands.q):
        w += np.exp(1j * np.pi * np.multiply.outer(z, q + 2 * n)) @ c[j]
    w /= math.sqrt(n_q * L)
    # move the centre to the requested site near z = 0
    dens = np.abs(w) ** 2
    zc = L / (2 * np.pi) * np.angle(np.sum(dens * np.exp(2j * np.pi * z / L)))
    shift = int(round(site0 - zc))
    w = np.roll(w, shift * P)
    i0 = int(np.argmin(np.abs(z - (zc + shift))))
    i0 = int(np.argmax(np.abs(w[max(i0 - P // 2, 0):i0 + P // 2]))) + max(i0 - P // 2, 0)
    w *= np.exp(-1j * np.angle(w[i0]))
    imag = float(np.max(np.abs(w.imag)) / np.max(np.abs(w.real)))
    if imag > 1e-6:
        raise RuntimeError(f"Wannier function not real (imag/real = {imag:.2e})")
    return WannierSet(z, w.real.copy(), P, L, float(zc + shift), bands, band)


def tc_wannier(ws: WannierSet) -> float:
    """t_c = -<w_0|H|w_1> (E_R units)."""
    return -ws.hamiltonian_element(0, 1)


def gaussian_overlap(ws: WannierSet, V0_over_ER: float) -> float:
    """Overlap of w0 with the harmonic-oscillator ground state of V0 sin^2 (or cos^2)."""
    ell = 1.0 / (math.pi * V0_over_ER ** 0.25)
    g = np.exp(-((ws.z - ws.site0) ** 2) / (2 * ell ** 2))
    g /= math.sqrt(np.sum(g ** 2) * ws.dz)
    return float(abs(np.sum(g * ws.w0) * ws.dz))


# --- spin-flip assisted hopping ---------------------------------------------

def driven_hopping(w_plus: WannierSet, w_minus: WannierSet, omega_dr, omega3, rabi, delta,
                   norm_tol=1e-6) -> float:
    """t_pm = <w_-(0)| (Omega_dr/2) cos^2(th) - 2 Omega_3 sin(th) cos(th) |w_+(a/2)>.

    th = theta/2 with theta = atan2(Omega0 cos(pi z), Delta).  Energies in any
    common unit; the result is in that unit.
    """
    for ws in (w_plus, w_minus):
        if abs(ws.norm() - 1) > norm_tol:
            raise ValueError("Wannier functions must be normalised")
    if not np.allclose(w_plus.z, w_minus.z):
        raise ValueError("Wannier sets must share a grid")
    z = w_plus.z
    th = 0.5 * np.arctan2(rabi * np.cos(np.pi * z), delta)
    op = 0.5 * omega_dr * np.cos(th) ** 2 - 2 * omega3 * np.sin(th) * np.cos(th)
    return float(np.sum(w_minus.w0 * op * w_plus.w0) * w_plus.dz)


@dataclass
class SublatticePair:
    plus: WannierSet
    minus: WannierSet
    tc_plus: float
    tc_minus: float


def sublattice_wannier(rabi, delta, n_q=16, e_r=1.0, min_gap_ratio=1.0) -> SublatticePair:
    """Wannier functions of both spin sublattices (energies in units of e_r)."""
    bp = band_structure(adiabatic_potential(rabi, delta, +1, e_r), n_q=n_q, n_bands=3)
    bm = band_structure(adiabatic_potential(rabi, delta, -1, e_r), n_q=n_q, n_bands=3)
    cut = max(bp.cutoff, bm.cutoff)
    if bp.cutoff != cut:
        bp = band_structure(bp.potential, n_q=n_q, n_bands=3, cutoff=cut)
    if bm.cutoff != cut:
        bm = band_structure(bm.potential, n_q=n_q, n_bands=3, cutoff=cut)
    wp = wannier_functions(bp, site0=0.5, min_gap_ratio=min_gap_ratio)
    wm = wannier_functions(bm, site0=0.0, points_per_period=wp.points_per_period,
                           min_gap_ratio=min_gap_ratio)
    return SublatticePair(wp, wm, tc_numeric(bp), tc_numeric(bm))


def t_ratio(omega_dr, rabi, delta, e_r, omega3=0.0, n_q=16) -> float:
    """|t_pm| / t_c(+) for energies given in any unit alongside e_r."""
    pair = sublattice_wannier(rabi / e_r, delta / e_r, n_q=n_q)
    tpm = driven_hopping(pair.plus, pair.minus, omega_dr / e_r, omega3 / e_r, rabi / e_r, delta / e_r)
    return abs(tpm) / pair.tc_plus


@dataclass
class TRatioSweep:
    x: np.ndarray  # Omega0 / Delta
    y: np.ndarray  # Omega_dr / Omega0
    t_rat: np.ndarray  # (len(y), len(x))
    V0_over_ER: float

    def to_csv(self) -> str:
        buf = io.StringIO()
        buf.write("# units: dimensionless\n")
        buf.write("omega_dr_over_omega0,omega0_over_delta,log10_t_rat\n")
        for i, y in enumerate(self.y):
            for j, x in enumerate(self.x):
                buf.write(f"{y:.10g},{x:.10g},{math.log10(self.t_rat[i, j]):.10g}\n")
        return buf.getvalue()

    def has_unit_contour(self) -> bool:
        return bool(self.t_rat.min() < 1 < self.t_rat.max())


def t_ratio_sweep(x_values, y_values, n_b_sqrt=1.0, n_q=16) -> TRatioSweep:
    """t_rat over (Omega_dr/Omega0, Omega0/Delta) holding sqrt(V0/4E_R) fixed.

    With E_R = 1, V0 = 4 n_b^2 and Delta = 2 V0 / (sqrt(1 + x^2) - 1).
    """
    V0 = 4 * n_b_sqrt ** 2
    x_values = np.asarray(x_values, dtype=float)
    y_values = np.asarray(y_values, dtype=float)
    out = np.zeros((len(y_values), len(x_values)))
    for j, x in enumerate(x_values):
        delta = 2 * V0 / (math.sqrt(1 + x * x) - 1)
        rabi = x * delta
        pair = sublattice_wannier(rabi, delta, n_q=n_q)
        unit = driven_hopping(pair.plus, pair.minus, 1.0, 0.0, rabi, delta)
        out[:, j] = np.abs(unit * y_values * rabi) / pair.tc_plus
    return TRatioSweep(x_values, y_values, out, V0)


# --- spin-orbit hopping -------------------------------------------------------

def soi_hopping(lam, V0, E_R, a) -> float:
    """Calibrated SOI hopping in ueV.

    t = (hbar lam pi^2 / a) sqrt(V0/E_R) exp(-(pi^2/16) sqrt(V0/E_R)), with lam
    in m/s, a in m and V0, E_R in ueV.
    """
    if lam < 0 or not (V0 > 0 and E_R > 0 and a > 0):
        raise ValueError("invalid inputs")
    s = math.sqrt(V0 / E_R)
    return HBAR_UEV_S * lam * math.pi ** 2 / a * s * math.exp(-math.pi ** 2 / 16 * s)


def soi_hopping_verbatim(lam, V0, E_R, a) -> dict:
    """The printed expression E_R * lam sqrt(V0 E_R) pi^2/a exp(...) with units as given."""
    s = math.sqrt(V0 / E_R)
    val = E_R * lam * math.sqrt(V0 * E_R) * math.pi ** 2 / a * math.exp(-math.pi ** 2 / 16 * s)
    return {"value": val, "units": "ueV * (m/s) * ueV / m  (dimensions do not close)"}


# --- on-site interaction --------------------------------------------------

def coulomb_kernel(dz, eps_r, d_scr, z0):
    """e^2 f_s / (4 pi eps sqrt(dz^2 + z0^2)) in ueV (dz, d_scr, z0 in metres)."""
    pref = E_CHARGE ** 2 / (4 * math.pi * EPS_0 * eps_r) / UEV  # ueV m
    adz = np.abs(dz)
    fs = 1.0 if math.isinf(d_scr) else 1.0 - adz / np.sqrt(adz ** 2 + 4 * d_scr ** 2)
    return pref * fs / np.sqrt(adz ** 2 + z0 ** 2)


@dataclass
class Interaction:
    U: float
    tensor: np.ndarray  # U_ijkl over sites (0, 1)
    sites: tuple
    refine: int
    rel_change: float


def _interaction(ws: WannierSet, a, eps_r, d_scr, z0, refine, sites):
    """U_ijkl = int dD K(a D) C_il,jk(D) with the pair-density correlation
    C_il,jk(D) = int rho_il(z) rho_jk(z + D) dz (z, D in units of a).

    C is smooth on the grid scale, so it is splined and integrated against the
    kernel adaptively; this resolves kernel features far below the grid spacing.
    """
    _, w = ws.refined(refine)
    P = ws.points_per_period * refine
    n = len(w)
    dz = 1.0 / P
    lag = (np.arange(n) - n // 2) * dz
    funcs = {j: np.roll(w, j * P) for j in sites}
    ft = {}
    for i in sites:
        for l in sites:
            ft[i, l] = np.fft.fft(funcs[i] * funcs[l])
    kernel = lambda D: coulomb_kernel(a * D, eps_r, d_scr, z0)
    scales = sorted({min(z0 / a, 0.5), min(2 * d_scr / a, 0.5) if math.isfinite(d_scr) else 0.5})
    edges = [0.0, *[s for s in scales if s > 0], lag[-1]]
    # absolute floor well below U: the on-site correlation peak sets the scale
    floor = 1e-13 * kernel(0.0) * float(np.sum(w ** 4) * dz)
    T = np.zeros((len(sites),) * 4)
    for ii, i in enumerate(sites):
        for ll, l in enumerate(sites):
            for jj, j in enumerate(sites):
                for kk, k in enumerate(sites):
                    corr = np.fft.fftshift(np.real(np.fft.ifft(np.conj(ft[i, l]) * ft[j, k]))) * dz
                    spline = CubicSpline(lag, corr)
                    total = 0.0
                    for sgn in (1.0, -1.0):
                        for lo, hi in zip(edges[:-1], edges[1:]):
                            val, _ = quad(lambda D: kernel(D) * spline(sgn * D), lo, hi,
                                          limit=400, epsabs=floor, epsrel=1e-11)
                            total += val
                    T[ii, jj, kk, ll] = total
    return T


def onsite_interaction(ws: WannierSet, a, eps_r, d_scr=math.inf, z0=None, sites=(0, 1),
                       refine=2, rel_tol=1e-3) -> Interaction:
    """Screened, regularised 1D Coulomb matrix elements U_ijkl (ueV).

    U_ijkl = int int w_i(z) w_j(z') V(z - z') w_k(z') w_l(z) dz dz'
    with 1/|z-z'| replaced by 1/sqrt((z-z')^2 + z0^2); z0 defaults to a/20.
    Convergence is checked against the same integral at half the resolution.
    """
    z0 = a / 20 if z0 is None else z0
    if not z0 > 0:
        raise ValueError("z0 must be positive")
    if not d_scr > 0:
        raise ValueError("d_scr must be positive")
    i0 = list(sites).index(0)
    fine = _interaction(ws, a, eps_r, d_scr, z0, refine, sites)
    coarse = _interaction(ws, a, eps_r, d_scr, z0, 1, (0,)) if refine > 1 else fine[i0:i0 + 1, i0:i0 + 1, i0:i0 + 1, i0:i0 + 1]
    U = fine[i0, i0, i0, i0]
    change = abs(U - coarse[0, 0, 0, 0]) / abs(U)
    if change > rel_tol:
        raise BandConvergenceError(f"interaction integral not converged (change {change:.2e})")
    return Interaction(float(U), fine, tuple(sites), refine, float(change))


def screening_for_ratio(ws: WannierSet, a, eps_r, target, z0=None, lo=1e-6, hi=1e3):
    """d_scr (m) at which U equals ``target`` ueV, bisected in log d over [lo, hi] * a.

    U grows monotonically with d_scr, from zero towards the unscreened value.
    """
    f = lambda ld: onsite_interaction(ws, a, eps_r, math.exp(ld) * a, z0, sites=(0,)).U - target
    f_lo, f_hi = f(math.log(lo)), f(math.log(hi))
    if f_lo > 0 or f_hi < 0:
        raise ValueError(f"target U = {target:.4g} ueV outside [{f_lo + target:.4g}, {f_hi + target:.4g}]")
    return math.exp(brentq(f, math.log(lo), math.log(hi), xtol=1e-6)) * a


# --- parameter summary --------------------------------------------------

def site_potentials(n_sites, values=None, width=0.0, seed=None) -> np.ndarray:
    """Per-site chemical potentials: explicit list, or iid uniform in [-w/2, w/2]."""
    if values is not None:
        v = np.asarray(values, dtype=float)
        if len(v) != n_sites:
            raise ValueError("need one value per site")
        return v
    rng = np.random.default_rng(seed)
    return rng.uniform(-width / 2, width / 2, n_sites)


@dataclass
class HubbardParams:
    E_R: float
    V0: float
    t_c_analytic: float
    t_c_numeric: float
    t_c_wannier: float
    t_pm: float | None
    t_soi: float
    t_soi_verbatim: dict
    U: float | None
    U_tensor: list | None
    d_scr: float | None
    staggered_offset: float
    isolation: float  # gap / bandwidth of the lowest band
    mu: list = field(default_factory=list)

    @property
    def t_rat(self):
        return None if self.t_pm is None else abs(self.t_pm) / self.t_c_numeric

    def to_dict(self):
        d = asdict(self)
        d["t_rat"] = self.t_rat
        return d


def hubbard_parameters(rabi, delta, a, E_R, eps_r=1.0, lam=0.0, d_scr=None, omega_dr=None,
                       omega3=0.0, n_sites=0, mu_values=None, mu_width=0.0, seed=None,
                       n_q=16, min_gap_ratio=0.5) -> HubbardParams:
    """Collect lattice Hubbard parameters (ueV) for the lower (|->) sublattice.

    rabi, delta, E_R in ueV; a in m.  Shallow lattices (V0 ~ E_R) have a gap
    comparable to the bandwidth, hence the relaxed default ``min_gap_ratio``;
    the achieved ratio is reported as ``isolation``.
    """
    V0 = float(trap_depth(rabi, delta))
    pair = sublattice_wannier(rabi / E_R, delta / E_R, n_q=n_q, min_gap_ratio=min_gap_ratio)
    wm = pair.minus
    tc_num = pair.tc_minus * E_R
    tc_w = tc_wannier(wm) * E_R
    tpm = None
    if omega_dr is not None:
        tpm = driven_hopping(pair.plus, pair.minus, omega_dr / E_R, omega3 / E_R,
                             rabi / E_R, delta / E_R) * E_R
    U = tensor = None
    if d_scr is not None:
        inter = onsite_interaction(wm, a, eps_r, d_scr)
        U, tensor = inter.U, inter.tensor.tolist()
    # band centres of the two sublattices (uncentred potentials differ by |Delta|)
    ep = np.mean(pair.plus.bands.energies[:, 0]) * E_R + 0.5 * abs(delta)
    em = np.mean(pair.minus.bands.energies[:, 0]) * E_R - 0.5 * abs(delta)
    return HubbardParams(
        E_R=E_R, V0=V0, t_c_analytic=float(tc_analytic(V0, E_R)), t_c_numeric=tc_num,
        t_c_wannier=tc_w, t_pm=tpm, t_soi=soi_hopping(lam, V0, E_R, a) if lam > 0 else 0.0,
        t_soi_verbatim=soi_hopping_verbatim(lam, V0, E_R, a), U=U, U_tensor=tensor,
        d_scr=d_scr, staggered_offset=float(0.5 * (ep - em)),
        isolation=float(wm.bands.gap() / wm.bands.bandwidth()),
        mu=site_potentials(n_sites, mu_values, mu_width, seed).tolist() if n_sites else [],
    )
