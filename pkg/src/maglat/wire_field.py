"""Meandering superconducting wire: field maps, closed forms and Rabi amplitudes.

Wire n (n = 0 .. N-1) sits at z = n a, x = 0 and carries (-1)^n I0 cos(wt).
Per wire the field is (mu0 I / 2 pi) (x, 0, z - n a) / ((z - n a)^2 + x^2),
i.e. the azimuthal line field rotated by 90 degrees in the (z, x) plane, which
leaves |B| unchanged and gives the closed form
    b_z + i b_x = - sum_n (-1)^n / (n + xi),   xi = -z + i x   (a = 1).
"""

from __future__ import annotations

import io
import json
import math
from dataclasses import asdict, dataclass

import numpy as np

from .special import digamma
from .units import C_LIGHT, MU_0, MU_B_UEV_PER_T

CRITICAL_CURRENT_DENSITY = 30e6 * 1e4  # 30 MA/cm^2 in A/m^2


@dataclass(frozen=True)
class WireGeometry:
    n_wires: int
    a: float          # m
    d: float          # m, depth of the electron layer below the wire plane
    current: float    # A
    omega: float = 0.0
    cross_section: tuple | None = None  # (width, height) in m

    def __post_init__(self):
        if self.n_wires < 1:
            raise ValueError("need at least one wire")
        if not (self.a > 0 and self.d > 0 and self.current > 0):
            raise ValueError("a, d and current must be positive")

    @property
    def center(self) -> float:
        return 0.5 * (self.n_wires - 1) * self.a

    @property
    def wire_radius(self) -> float:
        if self.cross_section:
            return 0.5 * min(self.cross_section)
        return 1e-9 * self.a

    @property
    def current_density(self) -> float | None:
        if not self.cross_section:
            return None
        w, h = self.cross_section
        return self.current / (w * h)

    @property
    def feasible(self) -> bool | None:
        j = self.current_density
        return None if j is None else j <= CRITICAL_CURRENT_DENSITY


@dataclass
class FieldMap:
    z: np.ndarray
    x: np.ndarray
    Bx: np.ndarray
    Bz: np.ndarray
    geometry: WireGeometry

    @property
    def magnitude(self):
        return np.hypot(self.Bx, self.Bz)

    def to_csv(self, length_unit="nm") -> str:
        scale = {"nm": 1e9, "m": 1.0, "a": 1.0 / self.geometry.a}[length_unit]
        buf = io.StringIO()
        buf.write(f"# units: z,x in {length_unit}; Bx,Bz,|B| in T\n")
        buf.write("z,x,Bx,Bz,B\n")
        Z, X = np.broadcast_arrays(self.z, self.x)
        for z, x, bx, bz, b in zip(Z.ravel(), X.ravel(), self.Bx.ravel(), self.Bz.ravel(),
                                   self.magnitude.ravel()):
            buf.write(f"{z * scale:.10g},{x * scale:.10g},{bx:.10g},{bz:.10g},{b:.10g}\n")
        return buf.getvalue()


def biot_savart_map(geometry: WireGeometry, z, x) -> FieldMap:
    """Direct superposition of the N alternating line-current fields."""
    z, x = np.broadcast_arrays(np.asarray(z, dtype=float), np.asarray(x, dtype=float))
    n = np.arange(geometry.n_wires)
    dz = z[..., None] - n * geometry.a
    xx = x[..., None]
    rho2 = dz ** 2 + xx ** 2
    bad = np.any(rho2 <= geometry.wire_radius ** 2, axis=-1)
    if np.any(bad):
        idx = np.argwhere(bad)[0]
        raise ValueError(f"sample point inside a wire at index {tuple(int(i) for i in idx)}")
    sign = (-1.0) ** n
    pref = MU_0 * geometry.current / (2 * np.pi)
    Bx = pref * np.sum(sign * xx / rho2, axis=-1)
    Bz = pref * np.sum(sign * dz / rho2, axis=-1)
    return FieldMap(z, x, Bx, Bz, geometry)


def direct_sum(z, x, n_wires):
    """Dimensionless b_z + i b_x by explicit summation (a = 1, field unit mu0 I / 2 pi a)."""
    z = np.asarray(z, dtype=float)[..., None]
    x = np.asarray(x, dtype=float)[..., None]
    n = np.arange(n_wires)
    return -np.sum((-1.0) ** n / (n + (-z + 1j * x)), axis=-1)


def digamma_field(z, x, n_wires):
    """Closed form of b_z + i b_x via four digammas; ``n_wires=math.inf`` for the half-infinite array."""
    xi = -np.asarray(z, dtype=float) + 1j * np.asarray(x, dtype=float)
    if math.isinf(n_wires):
        return 0.5 * (digamma(xi / 2) - digamma((xi + 1) / 2))
    N = int(n_wires)
    return (-0.5 * digamma(xi / 2 + (N - 1) // 2 + 1) + 0.5 * digamma(xi / 2)
            + 0.5 * digamma((xi + 1) / 2 + N // 2) - 0.5 * digamma((xi + 1) / 2))


def _alternating_sum(term, tol=1e-12, n_terms=64):
    """Sum_{n>=0} (-1)^n term(n) using Euler-van Wijngaarden style averaging.

    Partial sums of an alternating series bracket the limit; repeated averaging
    of consecutive partial sums accelerates convergence.  Returns (value, partial_sums).
    """
    n = np.arange(n_terms)
    terms = (-1.0) ** n * term(n)
    partial = np.cumsum(terms)
    s = partial.copy()
    lead = abs(terms[0])
    while len(s) > 2:
        nxt = 0.5 * (s[:-1] + s[1:])
        if abs(nxt[-1] - s[-1]) < tol * lead:
            s = nxt
            break
        s = nxt
    return float(s[-1]), partial


@dataclass(frozen=True)
class RabiAmplitudes:
    """Rabi amplitudes in ueV for the central region of a long array.

    series_x / series_z: the alternating series (mu0 I / pi a) sum ... forms.
    center_x / center_z: peak values of the bi-infinite array field,
    (mu0 I / 2 pi a) * pi csch(pi d/a) and pi sech(pi d/a).
    """

    series_x: float
    series_z: float
    center_x: float
    center_z: float

    def to_dict(self):
        return asdict(self)


def rabi_series(d_over_a, tol=1e-12):
    """Dimensionless sums (Sx, Sz) multiplying mu0 I/(pi a) (Sx includes the d/a factor)."""
    u = float(d_over_a)
    sx, _ = _alternating_sum(lambda n: 1.0 / ((n + 0.5) ** 2 + u * u), tol)
    sz, _ = _alternating_sum(lambda n: (n + 0.5) / ((n + 0.5) ** 2 + u * u), tol, n_terms=128)
    return u * sx, sz


def rabi_amplitudes(d, a, current, g_factor) -> RabiAmplitudes:
    if not (d > 0 and a > 0):
        raise ValueError("d and a must be positive")
    u = d / a
    sx, sz = rabi_series(u)
    gmu = abs(g_factor) * MU_B_UEV_PER_T
    pref = gmu * MU_0 * current / (np.pi * a)
    unit = gmu * MU_0 * current / (2 * np.pi * a)
    return RabiAmplitudes(
        series_x=pref * sx,
        series_z=pref * sz,
        center_x=unit * np.pi / np.sinh(np.pi * u),
        center_z=unit * np.pi / np.cosh(np.pi * u),
    )


@dataclass(frozen=True)
class SineFit:
    amplitude: float
    period: float
    phase: float
    central_residual: float  # max |data - fit| / |A| in the central half
    edge_residual: float
    degenerate: bool

    def to_dict(self):
        return asdict(self)


def fit_sine_profile(z, values, a, center=None) -> SineFit:
    """Least-squares fit of A sin(pi z / a + phi) on the central half of the row.

    Residuals (max abs deviation relative to |A|) are reported for the central
    half and for the remaining edge samples separately.
    """
    z = np.asarray(z, dtype=float)
    v = np.asarray(values, dtype=float)
    span = z.max() - z.min()
    if len(z) < 8 * span / (2 * a):
        raise ValueError("need at least 8 samples per period")
    c0 = 0.5 * (z.max() + z.min()) if center is None else center
    central = np.abs(z - c0) <= span / 4
    basis = np.stack([np.sin(np.pi * z / a), np.cos(np.pi * z / a)], axis=-1)
    coef, *_ = np.linalg.lstsq(basis[central], v[central], rcond=None)
    A = float(np.hypot(*coef))
    phase = float(np.arctan2(coef[1], coef[0]))
    fit = basis @ coef
    degenerate = A <= 1e-12 * max(np.max(np.abs(v)), 1e-300)
    norm = A if not degenerate else 1.0
    res = np.abs(v - fit) / norm
    edge = float(res[~central].max()) if np.any(~central) else 0.0
    return SineFit(A, 2 * a, phase, float(res[central].max()), edge, bool(degenerate))


@dataclass(frozen=True)
class JefimenkoEstimate:
    ratio: float
    warning: str | None


def jefimenko_ratio(d, omega, refractive_index=1.0) -> JefimenkoEstimate:
    """Retardation correction size omega d / c_medium."""
    r = omega * d * refractive_index / C_LIGHT
    return JefimenkoEstimate(r, "retardation not negligible" if r > 1e-2 else None)


def wire_report(geometry: WireGeometry, g_factor: float, z_samples_per_a=32, x_over_a=None,
                omega0=None):
    """Field row at the electron depth, sine fits of both components and Rabi amplitudes.

    ``omega0`` (ueV) enables the check that the sigma_z modulation is negligible.
    """
    a = geometry.a
    x = geometry.d if x_over_a is None else x_over_a * a
    z = np.arange(0, (geometry.n_wires - 1) * z_samples_per_a + 1) * (a / z_samples_per_a)
    fm = biot_savart_map(geometry, z, np.full_like(z, x))
    fx = fit_sine_profile(z, fm.Bx, a)
    fz = fit_sine_profile(z, fm.Bz, a)
    amps = rabi_amplitudes(geometry.d, a, geometry.current, g_factor)
    omega0_flag = None if omega0 is None else bool(amps.center_z / omega0 > 0.01)
    return {
        "fit_Bx": fx.to_dict(), "fit_Bz": fz.to_dict(), "rabi": amps.to_dict(),
        "phase_difference": float((fx.phase - fz.phase) % (2 * np.pi)),
        "current_density": geometry.current_density, "feasible": geometry.feasible,
        "jefimenko": asdict(jefimenko_ratio(geometry.d, geometry.omega)),
        "omega0_z_flag": omega0_flag,
    }, fm


def dumps(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True)
