"""Parameter records shared by the trap, lattice and implementation modules."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .units import (
    H_PLANCK,
    HBAR,
    HBAR_UEV_S,
    K_B_UEV_PER_K,
    M_ELECTRON,
    MU_B_UEV_PER_T,
    UEV,
)


@dataclass(frozen=True)
class MaterialSpec:
    """Host-material constants.

    eff_mass is in units of the free electron mass; rates and linewidths are
    energies in ueV; SOI strengths and sound speed in m/s.
    """

    name: str
    g_factor: float
    eff_mass: float
    dielectric_const: float = 1.0
    sound_speed: float | None = None
    rashba: float = 0.0
    dresselhaus: float = 0.0
    phonon_rate: float = 0.0
    linewidth: float = 0.0

    def __post_init__(self):
        if not self.eff_mass > 0:
            raise ValueError(f"eff_mass must be positive, got {self.eff_mass}")
        if not self.dielectric_const >= 1:
            raise ValueError(f"dielectric_const must be >= 1, got {self.dielectric_const}")
        for name in ("phonon_rate", "linewidth", "rashba", "dresselhaus"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if self.sound_speed is not None and not self.sound_speed > 0:
            raise ValueError("sound_speed must be positive when given")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class DriveSpec:
    """Drive and lattice parameters.

    Stored primaries are the drive frequency ``omega``, the detuning
    ``detuning`` = omega0 - omega and the Rabi frequency ``rabi`` (all rad/s),
    plus the lattice constant ``a`` in metres.  ``g_factor`` is optional and is
    only needed to translate to field amplitudes B0 and B1.
    """

    omega: float
    detuning: float
    rabi: float
    a: float
    g_factor: float | None = None

    def __post_init__(self):
        if not self.a > 0:
            raise ValueError("lattice constant a must be positive")
        if self.omega < 0:
            raise ValueError("omega must be >= 0")
        if self.rabi < 0:
            raise ValueError("rabi frequency must be >= 0")

    @classmethod
    def from_fields(cls, g_factor: float, B0: float, B1: float, omega: float, a: float) -> "DriveSpec":
        """Build from static/RF field amplitudes in tesla and omega in rad/s."""
        if B0 < 0 or B1 < 0:
            raise ValueError("field amplitudes must be >= 0")
        g = abs(g_factor)
        omega0 = g * MU_B_UEV_PER_T * B0 / HBAR_UEV_S
        rabi = g * MU_B_UEV_PER_T * B1 / HBAR_UEV_S
        return cls(omega=omega, detuning=omega0 - omega, rabi=rabi, a=a, g_factor=g_factor)

    @classmethod
    def from_energies(cls, rabi_ueV: float, detuning_ueV: float, omega_ueV: float, a: float,
                      g_factor: float | None = None) -> "DriveSpec":
        """Build from hbar*Omega0, hbar*Delta and hbar*omega in ueV."""
        return cls(omega=omega_ueV / HBAR_UEV_S, detuning=detuning_ueV / HBAR_UEV_S,
                   rabi=rabi_ueV / HBAR_UEV_S, a=a, g_factor=g_factor)

    @property
    def omega0(self) -> float:
        return self.omega + self.detuning

    @property
    def k(self) -> float:
        return math.pi / self.a

    def _field(self, omega_like: float) -> float:
        if not self.g_factor:
            raise ValueError("g_factor required to express drive as a field")
        return omega_like * HBAR_UEV_S / (abs(self.g_factor) * MU_B_UEV_PER_T)

    @property
    def B0(self) -> float:
        return self._field(self.omega0)

    @property
    def B1(self) -> float:
        return self._field(self.rabi)

    # energies in ueV
    @property
    def omega_ueV(self) -> float:
        return self.omega * HBAR_UEV_S

    @property
    def detuning_ueV(self) -> float:
        return self.detuning * HBAR_UEV_S

    @property
    def rabi_ueV(self) -> float:
        return self.rabi * HBAR_UEV_S

    def profile(self, z):
        """Spatial envelope cos(kz) of the Rabi frequency."""
        return np.cos(self.k * np.asarray(z))

    def to_dict(self) -> dict:
        d = asdict(self)
        d.update(omega0=self.omega0, k=self.k, omega_ueV=self.omega_ueV,
                 detuning_ueV=self.detuning_ueV, rabi_ueV=self.rabi_ueV,
                 frequency_Hz=self.omega / (2 * math.pi))
        return d


@dataclass(frozen=True)
class EnvironmentSpec:
    temperature: float = 0.0  # K

    def __post_init__(self):
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")

    @property
    def thermal_energy(self) -> float:
        """k_B T in ueV."""
        return self.temperature * K_B_UEV_PER_K

    def to_dict(self) -> dict:
        return {"temperature": self.temperature, "thermal_energy": self.thermal_energy}


def zeeman_rabi(g_factor, B):
    """Zeeman/Rabi energy |g| mu_B B in ueV for a field B in tesla."""
    if (B < 0) if isinstance(B, (int, float)) else bool((B < 0).any()):
        raise ValueError("field must be >= 0")
    return abs(g_factor) * MU_B_UEV_PER_T * B


def recoil_energy(a: float, m: float) -> float:
    """Recoil energy h^2 / (8 m a^2) in ueV (a in metres, m in m0)."""
    if not (a > 0 and m > 0):
        raise ValueError("a and m must be positive")
    return H_PLANCK ** 2 / (8.0 * m * M_ELECTRON * a ** 2) / UEV


def hbar2_over_2m(m: float) -> float:
    """hbar^2/(2m) in ueV * m^2."""
    return HBAR ** 2 / (2.0 * m * M_ELECTRON) / UEV


@dataclass(frozen=True)
class TableMaterial:
    """Row of the Rabi-frequency table: g-factor (or range) per host."""

    name: str
    g_low: float
    g_high: float


TABLE_MATERIALS = (
    TableMaterial("GaAs", 0.44, 0.44),
    TableMaterial("InAs", 14.9, 14.9),
    TableMaterial("InSb", 70.0, 70.0),
    TableMaterial("DMS", 100.0, 1000.0),
    TableMaterial("MoS2", 2.21, 2.21),
    TableMaterial("WS2", 2.84, 2.84),
)

# field levels in tesla: (state of the art, optimistic)
WIRE_FIELDS = (10e-3, 50e-3)
SAW_FIELDS = (50e-3, 100e-3)

# reference values, ueV: (wire_low, wire_high, saw_low, saw_high)
TABLE_REFERENCE = {
    "GaAs": (0.3, 1.3, 1.3, 2.5),
    "InAs": (8.6, 43.0, 43.0, 86.0),
    "InSb": (41.0, 200.0, 200.0, 410.0),
    "DMS": (58.0, 2900.0, 290.0, 5800.0),
    "MoS2": (1.3, 6.4, 6.4, 13.0),
    "WS2": (1.6, 8.2, 8.2, 16.0),
}


MATERIALS = {
    "InAs_electron": MaterialSpec("InAs_electron", g_factor=-14.9, eff_mass=0.023, dielectric_const=15.15,
                                  rashba=1e4, phonon_rate=0.3, linewidth=0.05),
    "InAs_heavy_hole": MaterialSpec("InAs_heavy_hole", g_factor=-14.9, eff_mass=0.836, dielectric_const=15.15,
                                    sound_speed=25e3, phonon_rate=0.3, linewidth=0.05),
    "InSb_heavy_hole": MaterialSpec("InSb_heavy_hole", g_factor=-70.0, eff_mass=0.627, dielectric_const=16.8,
                                    sound_speed=10e3, phonon_rate=0.3, linewidth=0.05),
    "GaAs_electron": MaterialSpec("GaAs_electron", g_factor=-0.44, eff_mass=0.067, dielectric_const=12.9,
                                  sound_speed=2.9e3, phonon_rate=0.3, linewidth=0.05),
}


def material(name: str) -> MaterialSpec:
    try:
        return MATERIALS[name]
    except KeyError:
        raise KeyError(f"unknown material {name!r}; known: {sorted(MATERIALS)}") from None


__all__ = [
    "MaterialSpec", "DriveSpec", "EnvironmentSpec", "zeeman_rabi", "recoil_energy", "hbar2_over_2m",
    "TABLE_MATERIALS", "TABLE_REFERENCE", "WIRE_FIELDS", "SAW_FIELDS", "MATERIALS", "material",
]
